from django.apps import AppConfig


class ExperimentsConfig(AppConfig):
    name = 'cemstokes.apps.experiments'

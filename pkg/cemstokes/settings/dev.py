from cemstokes.settings.base import *  # noqa: F401,F403

DEBUG = True

LOGGING['loggers']['cemstokes']['level'] = 'DEBUG'  # noqa: F405

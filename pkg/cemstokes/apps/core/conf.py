import os

from django.conf import settings

from cemstokes.settings.base import CEM_SOLVER as DEFAULTS


def _settings_available():
    # the library is usable without manage.py; only consult Django when a
    # settings module was selected or configure() was called
    return settings.configured or 'DJANGO_SETTINGS_MODULE' in os.environ


def solver_setting(name):
    """ returns the active value of a `CEM_SOLVER` entry

    Args:
        name: key of the entry, e.g. 'RANK_TOL'

    Returns: the project value when Django is configured, else the default
    """
    if name not in DEFAULTS:
        raise KeyError('unknown solver setting: {}'.format(name))

    if _settings_available():
        overrides = getattr(settings, 'CEM_SOLVER', {})
        return overrides.get(name, DEFAULTS[name])

    return DEFAULTS[name]

"""
Django settings for the cemstokes project.

The project has no database and no web surface: Django provides the settings
layer, logging configuration, the management command line and the test
runner, and Django REST framework validates and renders the experiment
documents.
"""

import os

# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Nothing is signed, but Django refuses to start without a key.
SECRET_KEY = os.getenv('SECRET_KEY', 'cemstokes-local-key')

DEBUG = False

ALLOWED_HOSTS = []

# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',

    'rest_framework',

    'cemstokes.apps.core',
    'cemstokes.apps.mesh',
    'cemstokes.apps.fem',
    'cemstokes.apps.linalg',
    'cemstokes.apps.auxiliary',
    'cemstokes.apps.basis',
    'cemstokes.apps.solver',
    'cemstokes.apps.experiments',
]

# the solver never touches a database
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.AutoField'

USE_TZ = True

TIME_ZONE = 'UTC'

REST_FRAMEWORK = {
    'NON_FIELD_ERRORS_KEY': 'error',
    'COMPACT_JSON': False,
    'STRICT_JSON': True,
}

# Numerical defaults shared by every app. Read them through
# `cemstokes.apps.core.conf.solver_setting` so the library also works
# without a configured Django project.
CEM_SOLVER = {
    # relative residual bound for direct solves
    'SOLVE_TOL': 1e-10,

    # relative singular value cut-off for ranks and null spaces
    'RANK_TOL': 1e-10,

    # eigenvalues below this are treated as zero (ZeroLambda)
    'ZERO_EIGENVALUE_TOL': 1e-8,

    # Gauss points per direction on every fine cell
    'QUADRATURE_ORDER': 4,

    # saddle systems up to this size are factorized densely
    'DENSE_LIMIT': 2000,

    # worker threads for per-block eigenproblems and basis solves
    'THREADS': int(os.getenv('CEM_THREADS', '1')),

    # in-memory basis tables kept by the cache
    'BASIS_CACHE_SIZE': 32,

    # optional on-disk basis cache directory
    'BASIS_CACHE_DIR': os.getenv('CEM_CACHE_DIR') or None,

    # "relaxed" or "strict" construction of the pressure spaces
    'PRESSURE_SPACE': 'relaxed',

    # size of the relaxed constraint space, in multiples of ell
    'PRESSURE_RELAXED_FACTOR': 2,

    # "patch" or "global" set of velocity fields in the pressure constraints
    'CONSTRAINT_SCOPE': 'patch',

    # minimum-norm least squares when the pressure system is singular
    'ALLOW_LSTSQ_PRESSURE': True,
}

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'cemstokes': {
            'handlers': ['console'],
            'level': os.getenv('CEM_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}

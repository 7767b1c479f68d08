from cemstokes.settings.base import *  # noqa: F401,F403

DEBUG = True

# keep the test output readable
LOGGING['loggers']['cemstokes']['level'] = 'WARNING'  # noqa: F405

# no basis files are written by the tests
CEM_SOLVER = dict(CEM_SOLVER, THREADS=2, BASIS_CACHE_DIR=None)  # noqa: F405

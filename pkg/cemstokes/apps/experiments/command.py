"""
Shared plumbing of the experiment commands: config loading, solver setting
overrides, output files and error reporting.
"""
import json
import logging
import os

import pandas as pd
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from django.test.utils import override_settings

from cemstokes.apps.core.exceptions import (
    CemError, core_exception_handler, exit_code_for
)
from cemstokes.apps.core.renderers import write_json

from .exceptions import ConfigError
from .pipeline import Experiment
from .serializers import ExperimentConfigSerializer

logger = logging.getLogger(__name__)


def load_config(path, seed=None):
    """ reads and validates an experiment document

    Returns: ExperimentConfig
    """
    try:
        with open(path, encoding='utf-8') as handle:
            document = json.load(handle)
    except FileNotFoundError:
        raise ConfigError('config file not found', path=str(path))
    except (OSError, ValueError) as error:
        raise ConfigError('config file is not readable JSON', path=str(path),
                          reason=str(error))

    if not isinstance(document, dict):
        raise ConfigError('config document must be a JSON object', path=str(path))
    if seed is not None:
        document['seed'] = seed

    serializer = ExperimentConfigSerializer(data=document)
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def write_csv(path, rows, columns=None):
    """ UTF-8 CSV with a header row; missing values are left empty """
    frame = pd.DataFrame(rows, columns=columns)
    frame.to_csv(path, index=False, encoding='utf-8', na_rep='', float_format='%.10g',
                 lineterminator='\n')
    return frame


class ExperimentCommand(BaseCommand):
    """
    Base class of the experiment commands. Subclasses implement
    `run(experiment)` and return the names of the outputs they wrote.
    """
    outputs = ()

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='experiment JSON document')
        parser.add_argument('--out', required=True, help='output directory')
        parser.add_argument('--threads', type=int, default=None,
                            help='worker threads for block problems')
        parser.add_argument('--seed', type=int, default=None,
                            help='overrides the seed of the document')
        parser.add_argument('--concurrent-sweeps', action='store_true',
                            help='run sweep points concurrently')

    def handle(self, *args, **options):
        self.out = options['out']
        self.concurrent = options['concurrent_sweeps']
        os.makedirs(self.out, exist_ok=True)

        try:
            config = load_config(options['config'], options['seed'])
            overrides = dict(settings.CEM_SOLVER, **config.tolerances)
            if options['threads'] is not None:
                overrides['THREADS'] = options['threads']

            with override_settings(CEM_SOLVER=overrides):
                experiment = Experiment(config, threads=overrides['THREADS'])
                written = self.run(experiment)
                self.check_outputs(config, written)
                if config.record_timings:
                    write_json(self.path('timings.json'), experiment.timings, 'timings')
        except Exception as exc:
            payload = core_exception_handler(exc)
            if payload is None:
                # still leave a machine-readable trace before the traceback
                write_json(self.path('error.json'), {'errors': {
                    'code': 'internal_error',
                    'detail': str(exc),
                    'type': exc.__class__.__name__,
                }})
                raise
            content = write_json(self.path('error.json'), payload)
            raise CommandError(content.decode('utf-8'), returncode=exit_code_for(exc))

        self.stdout.write('wrote {}'.format(', '.join(sorted(written))))

    def path(self, name):
        return os.path.join(self.out, name)

    def check_outputs(self, config, written):
        """ every declared output of the command has to exist """
        missing = [config.output(name) for name in self.outputs
                   if config.output(name) and not os.path.exists(self.path(config.output(name)))]
        if missing:
            raise CemError('declared outputs were not produced', missing=missing)

    def run(self, experiment):
        raise NotImplementedError

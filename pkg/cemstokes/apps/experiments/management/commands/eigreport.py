from cemstokes.apps.core.renderers import write_json
from cemstokes.apps.experiments.command import ExperimentCommand, write_csv
from cemstokes.apps.experiments.pipeline import eigen_rows, eigen_summary


class Command(ExperimentCommand):
    help = 'Writes the local velocity and pressure spectra of every coarse level.'
    outputs = ('eigreport', 'eigen_summary')

    def run(self, experiment):
        config = experiment.config
        rows, summaries = [], []
        for Nx in config.coarse:
            level = experiment.level(Nx)
            for row in eigen_rows(level):
                rows.append(dict(Nx=Nx, **row))
            summaries.append(eigen_summary(level))

        written = []
        if config.output('eigreport'):
            write_csv(self.path(config.output('eigreport')), rows)
            written.append(config.output('eigreport'))
        if config.output('eigen_summary'):
            write_json(self.path(config.output('eigen_summary')), {'levels': summaries},
                       'eigen_summary')
            written.append(config.output('eigen_summary'))
        return written

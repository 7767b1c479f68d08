from cemstokes.apps.experiments.command import ExperimentCommand, write_csv
from cemstokes.apps.experiments.pipeline import decay_rows, localization_rows


class Command(ExperimentCommand):
    help = ('Measures the decay of the global basis functions and the '
            'localization error of the k-layer bases on the first coarse level.')
    outputs = ('decay', 'localization')

    def run(self, experiment):
        config = experiment.config
        Nx = config.coarse[0]

        written = []
        if config.output('decay'):
            write_csv(self.path(config.output('decay')),
                      decay_rows(experiment, Nx, config.decay_blocks))
            written.append(config.output('decay'))
        if config.output('localization'):
            write_csv(self.path(config.output('localization')),
                      localization_rows(experiment, Nx, config.decay_blocks,
                                        config.decay_layers))
            written.append(config.output('localization'))
        return written

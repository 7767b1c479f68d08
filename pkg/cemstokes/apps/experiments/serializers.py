from rest_framework import serializers

from cemstokes.apps.mesh.serializers import PerforationSpecSerializer, ShapeSerializer

from .exceptions import ConfigError
from .forcing import parse_component
from .models import DEFAULT_OUTPUTS, ExperimentConfig

SCHEMA_VERSION = 1

TOLERANCE_KEYS = ('SOLVE_TOL', 'RANK_TOL', 'ZERO_EIGENVALUE_TOL')


class MeshSerializer(serializers.Serializer):
    nx = serializers.IntegerField(min_value=4)
    shapes = ShapeSerializer(many=True, required=False, default=list)


class ForcingSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=['manufactured', 'constant', 'expression'])
    value = serializers.ListField(required=False, min_length=2, max_length=2)

    def validate(self, data):
        kind = data['kind']
        value = data.get('value')

        if kind == 'constant':
            try:
                data['value'] = [float(component) for component in value or (1.0, 0.0)]
            except (TypeError, ValueError):
                raise serializers.ValidationError('a constant force needs two numbers.')

        elif kind == 'expression':
            if value is None:
                raise serializers.ValidationError('an expression force needs two expressions.')
            for component in value:
                try:
                    parse_component(component)
                except ConfigError as error:
                    raise serializers.ValidationError(
                        '{}: {}'.format(error.detail, component))
            data['value'] = [str(component) for component in value]

        return data


class OutputsSerializer(serializers.Serializer):
    metrics = serializers.CharField(required=False, allow_null=True)
    fields = serializers.CharField(required=False, allow_null=True)
    eigen = serializers.CharField(required=False, allow_null=True)
    convergence = serializers.CharField(required=False, allow_null=True)
    decay = serializers.CharField(required=False, allow_null=True)
    localization = serializers.CharField(required=False, allow_null=True)
    eigreport = serializers.CharField(required=False, allow_null=True)
    eigen_summary = serializers.CharField(required=False, allow_null=True)

    def validate(self, data):
        for name, path in data.items():
            if path is not None and ('/' in path or '\\' in path or path.startswith('.')):
                raise serializers.ValidationError(
                    'output {} must be a plain file name.'.format(name))
        return data


class DecaySerializer(serializers.Serializer):
    blocks = serializers.ListField(child=serializers.IntegerField(min_value=0),
                                   required=False, allow_null=True, default=None)
    layers = serializers.ListField(child=serializers.IntegerField(min_value=0),
                                   required=False, min_length=1, default=[1, 2, 3, 4])


class ExperimentConfigSerializer(serializers.Serializer):
    schema = serializers.IntegerField()
    mesh = MeshSerializer()
    coarse = serializers.ListField(child=serializers.IntegerField(min_value=1),
                                   min_length=1)
    ell = serializers.IntegerField(min_value=1, default=3)
    k = serializers.JSONField(required=False, default='auto')
    k_factor = serializers.FloatField(min_value=0.0, default=1.5)
    forcing = ForcingSerializer()
    seed = serializers.IntegerField(default=0)
    outputs = OutputsSerializer(required=False, default=dict)
    record_timings = serializers.BooleanField(default=False)
    tolerances = serializers.DictField(child=serializers.FloatField(min_value=0.0),
                                       required=False, default=dict)
    compare_global = serializers.BooleanField(default=False)
    decay = DecaySerializer(required=False, default=dict)

    def validate_schema(self, schema):
        if schema != SCHEMA_VERSION:
            raise serializers.ValidationError(
                'unsupported schema {}, expected {}.'.format(schema, SCHEMA_VERSION))
        return schema

    def validate_k(self, k):
        if k == 'auto':
            return k
        values = k if isinstance(k, list) else [k]
        if not values or not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0
                                 for v in values):
            raise serializers.ValidationError(
                'k is "auto", a nonnegative integer or a nonempty list of them.')
        return values

    def validate_tolerances(self, tolerances):
        unknown = sorted(set(tolerances) - set(TOLERANCE_KEYS))
        if unknown:
            raise serializers.ValidationError(
                'unknown tolerances: {}.'.format(', '.join(unknown)))
        return tolerances

    def validate(self, data):
        nx = data['mesh']['nx']
        incompatible = [Nx for Nx in data['coarse'] if nx % Nx != 0]
        if incompatible:
            raise serializers.ValidationError(
                'nx = {} is not divisible by Nx = {}.'.format(
                    nx, ', '.join(str(Nx) for Nx in incompatible)))

        # decay studies run on the first coarse level
        blocks = (data.get('decay') or {}).get('blocks') or []
        outside = [i for i in blocks if i >= data['coarse'][0] ** 2]
        if outside:
            raise serializers.ValidationError(
                'decay blocks {} do not exist on a {n}x{n} coarse grid.'.format(
                    ', '.join(str(i) for i in outside), n=data['coarse'][0]))
        return data

    def create(self, validated_data):
        mesh = validated_data['mesh']
        spec = PerforationSpecSerializer().create({'shapes': mesh.get('shapes', [])})

        outputs = dict(DEFAULT_OUTPUTS)
        outputs.update(validated_data.get('outputs') or {})
        decay = validated_data.get('decay') or {}

        return ExperimentConfig(
            nx=mesh['nx'], spec=spec, coarse=tuple(validated_data['coarse']),
            ell=validated_data['ell'],
            k=validated_data['k'] if validated_data['k'] == 'auto'
            else tuple(validated_data['k']),
            k_factor=validated_data['k_factor'],
            forcing=dict(validated_data['forcing']),
            seed=validated_data['seed'], outputs=outputs,
            record_timings=validated_data['record_timings'],
            tolerances=dict(validated_data['tolerances']),
            compare_global=validated_data['compare_global'],
            decay_blocks=decay.get('blocks'),
            decay_layers=tuple(decay.get('layers') or (1, 2, 3, 4)),
        )

from pathlib import Path

from django.conf import settings
from dotenv import dotenv_values
from rest_framework import serializers

from breakup.exceptions import LabError
from equations.catalog import build_model
from equations.models import ModelKind
from .catalog import EXPERIMENT_DEFAULTS, EXPERIMENTS
from .models import RunConfig


def _lab(key):
    return lambda: settings.LAB[key]


class CommaSeparatedListField(serializers.ListField):
    """A list field that also accepts '0.1,0.05,0.01' from the command line or a config file."""

    def to_internal_value(self, data):
        if isinstance(data, str):
            data = [item.strip() for item in data.split(',') if item.strip()]
        elif not isinstance(data, (list, tuple)):
            data = [data]
        return super().to_internal_value(data)


class RunConfigSerializer(serializers.Serializer):
    experiment = serializers.ChoiceField(choices=sorted(EXPERIMENTS))
    model = serializers.ChoiceField(choices=[kind.value for kind in ModelKind],
                                    default=ModelKind.GEN_KDV.value)
    n = serializers.IntegerField(min_value=1, default=1)
    alpha = serializers.FloatField(default=1.0)
    beta = serializers.FloatField(default=1.0)
    c = CommaSeparatedListField(child=serializers.FloatField(), default=[0.0, 0.0, 1.0])
    p = CommaSeparatedListField(child=serializers.FloatField(), default=[0.0])
    eps = CommaSeparatedListField(child=serializers.FloatField(), default=[1e-2])
    half_width = serializers.FloatField(default=_lab('HALF_WIDTH'))
    size = serializers.IntegerField(default=_lab('GRID_SIZE'))
    dt = serializers.FloatField(default=_lab('DT'))
    dealias = serializers.BooleanField(default=_lab('DEALIAS'))
    t_end = serializers.FloatField(allow_null=True, default=None)
    snapshots = CommaSeparatedListField(child=serializers.FloatField(), default=list)
    window = CommaSeparatedListField(child=serializers.FloatField(), default=list)
    orders = CommaSeparatedListField(child=serializers.IntegerField(min_value=1), default=list)
    alphas = CommaSeparatedListField(child=serializers.FloatField(), default=list)
    t_grid = CommaSeparatedListField(child=serializers.FloatField(), default=[0.0])
    x_max = serializers.FloatField(default=_lab('PI2_X_MAX'))
    nodes = serializers.IntegerField(min_value=64, default=_lab('PI2_NODES'))
    output_dir = serializers.CharField(default=lambda: str(settings.BREAKUP_OUTPUT_DIR))
    seed = serializers.IntegerField(min_value=0, default=0)
    workers = serializers.IntegerField(min_value=1, default=lambda: settings.BREAKUP_WORKERS)

    def validate_size(self, value):
        if value < 16 or value % 2:
            raise serializers.ValidationError('Grid size must be an even number of at least 16')
        return value

    def validate_eps(self, value):
        if not value:
            raise serializers.ValidationError('At least one eps value is required')
        if any(eps <= 0 for eps in value):
            raise serializers.ValidationError('eps values must be positive')
        return value

    def validate_dt(self, value):
        if value <= 0:
            raise serializers.ValidationError('Time step must be positive')
        return value

    def validate_half_width(self, value):
        if value <= 0:
            raise serializers.ValidationError('Half-width must be positive')
        return value

    def validate_window(self, value):
        if len(value) not in (0, 2):
            raise serializers.ValidationError('Window is given as two values: lo,hi')
        if value and value[0] >= value[1]:
            raise serializers.ValidationError('Window must satisfy lo < hi')
        return value

    def validate_snapshots(self, value):
        if any(t < 0 for t in value):
            raise serializers.ValidationError('Snapshot times must be non-negative')
        return sorted(value)

    def validate_x_max(self, value):
        if value < 100:
            raise serializers.ValidationError('x_max below 100 does not reach the far field')
        return value

    def validate(self, attrs):
        for key, default in EXPERIMENT_DEFAULTS[attrs['experiment']].items():
            if key not in self.initial_data:
                attrs[key] = default() if callable(default) else default

        t_end = attrs.get('t_end')
        if t_end is not None:
            if t_end < 0:
                raise serializers.ValidationError({'t_end': 'Final time must be non-negative'})
            if attrs.get('snapshots') and max(attrs['snapshots']) > t_end:
                raise serializers.ValidationError({'snapshots': 'Snapshot times beyond t_end'})

        config = RunConfig(**self._as_config(attrs))
        try:
            config.build_model()
        except LabError as exc:
            raise serializers.ValidationError({'model': str(exc)})
        return attrs

    @staticmethod
    def _as_config(attrs):
        return {key: tuple(value) if isinstance(value, list) else value
                for key, value in attrs.items()}

    def create(self, validated_data):
        return RunConfig(**self._as_config(validated_data))


def load_config_file(path):
    """KEY=value pairs of a run configuration file, keys as serializer field names."""
    path = Path(path)
    if not path.is_file():
        raise serializers.ValidationError({'config': f'Configuration file not found: {path}'})
    known, values = RunConfigSerializer().fields, {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace('-', '_')
        if name not in known:
            raise serializers.ValidationError({'config': f'Unknown key {key!r} in {path}'})
        if value is None:
            raise serializers.ValidationError({'config': f'Key {key!r} in {path} has no value'})
        values[name] = value
    return values


def build_config(flags, path=None, experiment=None) -> RunConfig:
    """RunConfig from command-line flags; entries of the file at ``path`` take precedence."""
    data = {key: value for key, value in flags.items() if value is not None}
    if path:
        data.update(load_config_file(path))
    if experiment:
        data['experiment'] = experiment
    serializer = RunConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()

from rest_framework import serializers

from .models import Circle, PerforationSpec, Rect


class ShapeSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=['circle', 'rect'])

    # circle
    cx = serializers.FloatField(required=False)
    cy = serializers.FloatField(required=False)
    r = serializers.FloatField(required=False)

    # rect
    x0 = serializers.FloatField(required=False)
    y0 = serializers.FloatField(required=False)
    x1 = serializers.FloatField(required=False)
    y1 = serializers.FloatField(required=False)

    required_fields = {
        'circle': ('cx', 'cy', 'r'),
        'rect': ('x0', 'y0', 'x1', 'y1'),
    }

    def validate(self, data):
        missing = [name for name in self.required_fields[data['kind']]
                   if name not in data]
        if missing:
            raise serializers.ValidationError(
                "a {} needs the fields {}.".format(data['kind'], ', '.join(missing))
            )

        shape = self.to_shape(data)
        if not shape.inside_unit_square():
            raise serializers.ValidationError(
                "shapes must lie strictly inside the unit square."
            )
        return data

    @classmethod
    def to_shape(cls, data):
        if data['kind'] == 'circle':
            return Circle(cx=data['cx'], cy=data['cy'], r=data['r'])
        return Rect(x0=data['x0'], y0=data['y0'], x1=data['x1'], y1=data['y1'])


class PerforationSpecSerializer(serializers.Serializer):
    shapes = ShapeSerializer(many=True, required=False, default=list)

    def create(self, validated_data):
        shapes = tuple(ShapeSerializer.to_shape(entry)
                       for entry in validated_data.get('shapes', []))
        return PerforationSpec(shapes=shapes)

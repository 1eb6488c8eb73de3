# Operator descriptors:
# {"op":"maximal_directional","m":"sign","directions":"<path>"}
# {"op":"hilbert_directional","direction":["1","8"]}
from pathlib import Path

from rest_framework import serializers

from core_service.helpers import load_json
from direction_service.directions import Direction
from direction_service.serializers import FractionField, load_direction_set

from .multipliers import MultiplierSpec
from .services import OperatorSpec


class OperatorDescriptorSerializer(serializers.Serializer):
	op = serializers.ChoiceField(choices=OperatorSpec.KINDS)
	m = serializers.CharField(default='sign')
	direction = FractionField(required=False)
	directions = serializers.JSONField(required=False)

	def validate_m(self, value):
		try:
			return MultiplierSpec.parse(value)
		except ValueError as e:
			raise serializers.ValidationError(str(e))

	def validate_direction(self, value):
		if not 0 <= value < 1:
			raise serializers.ValidationError(f"Angle {value} is outside [0, 1).")
		return Direction(value)

	def validate_directions(self, value):
		'''A path to a direction set document, or the document inline.'''
		source = None
		if isinstance(value, str):
			path = Path(value)
			base = self.context.get('base_dir')
			if base is not None and not path.is_absolute():
				path = Path(base) / path
			try:
				payload = load_json(path)
			except (OSError, ValueError) as e:
				raise serializers.ValidationError(f"Cannot read direction set {value}: {e}")
			source = value
		else:
			payload = value
		V = load_direction_set(payload)
		return V, source

	def validate(self, attrs):
		directions, source = attrs.pop('directions', (None, None))
		try:
			attrs['spec'] = OperatorSpec(
				op=attrs['op'],
				multiplier=attrs.get('m'),
				directions=directions,
				direction=attrs.get('direction'),
				source=source,
			)
		except ValueError as e:
			raise serializers.ValidationError(str(e))
		return attrs


def load_operator(payload, base_dir=None) -> OperatorSpec:
	serializer = OperatorDescriptorSerializer(data=payload, context={'base_dir': base_dir})
	serializer.is_valid(raise_exception=True)
	return serializer.validated_data['spec']

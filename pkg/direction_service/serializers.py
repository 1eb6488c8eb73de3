# JSON documents for direction sets:
# {"family":"cantor","q":3,"n":2,"angles":[["0","1"],["2","9"],...]}
from rest_framework import serializers

from core_service.helpers import fraction_pair, parse_fraction

from .directions import DirectionSet


class FractionField(serializers.Field):
	'''Exact rational as a [numerator, denominator] string pair.'''
	default_error_messages = {
		'invalid': 'Expected an exact rational as a ["p", "q"] pair.',
	}

	def to_internal_value(self, data):
		try:
			return parse_fraction(data)
		except (TypeError, ValueError, ZeroDivisionError):
			self.fail('invalid')

	def to_representation(self, value):
		return fraction_pair(value)


class DirectionSetSerializer(serializers.Serializer):
	family = serializers.ChoiceField(choices=['uniform', 'lacunary', 'cantor', 'custom'], default='custom')
	N = serializers.IntegerField(required=False, min_value=1)
	q = serializers.IntegerField(required=False, min_value=3)
	n = serializers.IntegerField(required=False, min_value=1)
	ratio = FractionField(required=False)
	node = FractionField(required=False)
	angles = serializers.ListField(child=FractionField(), min_length=1)

	def validate_angles(self, value):
		for angle in value:
			if not 0 <= angle < 1:
				raise serializers.ValidationError(f"Angle {angle} is outside [0, 1).")
		for previous, current in zip(value, value[1:]):
			if not previous < current:
				raise serializers.ValidationError("Angles must be strictly increasing.")
		return value

	def validate(self, attrs):
		if attrs['family'] == 'cantor' and len(attrs['angles']) != 2 ** attrs.get('n', 0):
			raise serializers.ValidationError("A cantor set with parameter n has exactly 2^n angles.")
		return attrs

	def create(self, validated_data):
		angles = validated_data.pop('angles')
		family = validated_data.pop('family')
		return DirectionSet.from_angles(angles, family, **validated_data)

	@classmethod
	def document(cls, V: DirectionSet) -> dict:
		payload = {'family': V.family}
		for key in ('N', 'q', 'n', 'ratio', 'node'):
			if key in V.params:
				value = V.params[key]
				payload[key] = value if isinstance(value, int) else fraction_pair(value)
		payload['angles'] = [fraction_pair(angle) for angle in V.angles]
		return payload


def load_direction_set(payload) -> DirectionSet:
	serializer = DirectionSetSerializer(data=payload)
	serializer.is_valid(raise_exception=True)
	return serializer.save()


def certificate_document(V, certificate) -> dict:
	return {
		'node': fraction_pair(certificate.node),
		'subsequence': list(certificate.subsequence),
		'angles': [fraction_pair(V[index].angle) for index in certificate.subsequence],
		'length': len(certificate),
		'valid': certificate.is_valid(V),
	}

# Coefficient families:
# {"rects":[{"shift":0,"i":[j1,l1],"j":[j2,l2],"b":[re,im]},...],
#  "raster":{"origin":[["0","1"],["0","1"]],"side":["1","1"],"n":16}}
from rest_framework import serializers

from core_service.helpers import complex_pair, fraction_pair
from direction_service.serializers import FractionField

from .rectangles import SHIFTS, DyadicRect, Raster
from .services import ProductCoefficients


class ScaleOffsetField(serializers.ListField):
	child = serializers.IntegerField()

	def __init__(self, **kwargs):
		super().__init__(min_length=2, max_length=2, **kwargs)


class RectangleSerializer(serializers.Serializer):
	shift = serializers.ChoiceField(choices=SHIFTS, default=0)
	i = ScaleOffsetField()
	j = ScaleOffsetField()
	b = serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)

	def validate(self, attrs):
		(j1, l1), (j2, l2) = attrs['i'], attrs['j']
		attrs['rect'] = DyadicRect(attrs['shift'], j1, l1, j2, l2)
		attrs['value'] = complex(*attrs['b'])
		return attrs


class RasterSerializer(serializers.Serializer):
	origin = serializers.ListField(child=FractionField(), min_length=2, max_length=2)
	side = FractionField()
	n = serializers.IntegerField(min_value=1)


class ProductCoefficientsSerializer(serializers.Serializer):
	rects = RectangleSerializer(many=True)
	bounds = serializers.ListField(child=FractionField(), min_length=4, max_length=4, required=False)
	raster = RasterSerializer(required=False)

	def validate(self, attrs):
		raster = attrs.get('raster')
		try:
			attrs['coefficients'] = ProductCoefficients(
				[(entry['rect'], entry['value']) for entry in attrs['rects']],
				bounds=tuple(attrs['bounds']) if 'bounds' in attrs else None,
				raster=Raster(tuple(raster['origin']), raster['side'], raster['n']) if raster else None,
			)
		except ValueError as e:
			raise serializers.ValidationError(str(e))
		return attrs

	@classmethod
	def document(cls, C: ProductCoefficients) -> dict:
		payload = {'rects': [
			{'shift': rect.shift, 'i': [rect.j1, rect.l1], 'j': [rect.j2, rect.l2], 'b': complex_pair(value)}
			for rect, value in C.entries
		]}
		if C.bounds is not None:
			payload['bounds'] = [fraction_pair(value) for value in C.bounds]
		if C.raster is not None:
			payload['raster'] = {
				'origin': [fraction_pair(value) for value in C.raster.origin],
				'side': fraction_pair(C.raster.side),
				'n': C.raster.n,
			}
		return payload


def load_coefficients(payload) -> ProductCoefficients:
	serializer = ProductCoefficientsSerializer(data=payload)
	serializer.is_valid(raise_exception=True)
	return serializer.validated_data['coefficients']

# Tile sets:
# {"side":["1","1"],"tiles":[{"ann":1,"level":1,"arc":0,"a":0,"b":0},...]}
# A tile's id is its position in the sorted tile list.
# Coefficient dumps are CSV with columns id,re,im.
import pandas as pd
from rest_framework import serializers

from core_service.helpers import fraction_pair
from direction_service.serializers import FractionField

from .tiles import Tile


class TileSerializer(serializers.Serializer):
	ann = serializers.IntegerField()
	level = serializers.IntegerField(min_value=0)
	arc = serializers.IntegerField(min_value=0)
	a = serializers.IntegerField()
	b = serializers.IntegerField()

	def validate(self, attrs):
		try:
			attrs['tile'] = Tile(attrs['ann'], attrs['level'], attrs['arc'], attrs['a'], attrs['b'])
		except ValueError as e:
			raise serializers.ValidationError(str(e))
		return attrs


class TileSetSerializer(serializers.Serializer):
	side = FractionField(default=1)
	tiles = TileSerializer(many=True)

	def validate_side(self, value):
		if value <= 0:
			raise serializers.ValidationError("The ambient side must be positive.")
		return value

	def validate(self, attrs):
		tiles = [entry['tile'] for entry in attrs['tiles']]
		if len(set(tiles)) != len(tiles):
			raise serializers.ValidationError("duplicate tile")
		attrs['tile_list'] = sorted(tiles)
		return attrs

	@classmethod
	def document(cls, tiles, side=1) -> dict:
		return {
			'side': fraction_pair(side),
			'tiles': [
				{'ann': tile.ann_exp, 'level': tile.level, 'arc': tile.arc, 'a': tile.a, 'b': tile.b}
				for tile in sorted(tiles)
			],
		}


def load_tile_set(payload):
	'''(sorted tiles, side).'''
	serializer = TileSetSerializer(data=payload)
	serializer.is_valid(raise_exception=True)
	return serializer.validated_data['tile_list'], serializer.validated_data['side']


def tile_ids(tiles) -> dict:
	return {tile: index for index, tile in enumerate(tiles)}


def coefficient_frame(coefficients, tiles) -> pd.DataFrame:
	ids = tile_ids(tiles)
	rows = [
		{'id': ids[tile], 're': value.real, 'im': value.imag}
		for tile, value in sorted(coefficients.items(), key=lambda item: ids[item[0]])
	]
	return pd.DataFrame(rows, columns=['id', 're', 'im'])


def read_coefficients(path, tiles) -> dict:
	'''{tile: coefficient} from an id,re,im CSV; tiles without a row get 0.'''
	frame = pd.read_csv(path)
	missing = {'id', 're', 'im'} - set(frame.columns)
	if missing:
		raise ValueError(f"coefficient table lacks column(s) {', '.join(sorted(missing))}")
	coefficients = dict.fromkeys(tiles, 0j)
	for row in frame.itertuples(index=False):
		if not 0 <= int(row.id) < len(tiles):
			raise ValueError(f"coefficient for unknown tile id {row.id}")
		coefficients[tiles[int(row.id)]] = complex(row.re, row.im)
	return coefficients


def tree_document(tree, ids) -> dict:
	return {
		'kind': tree.kind,
		'top': fraction_pair(tree.witness),
		'tiles': [ids[tile] for tile in tree.tiles],
	}


def forest_document(forest, tiles) -> dict:
	'''Trees per σ-round with their selection certificates Σ|coef|² ≥ σ²/4·|sh|.'''
	ids = tile_ids(tiles)
	rounds = []
	for sigma_round in forest.rounds:
		trees = []
		for entry in sigma_round.trees:
			block = tree_document(entry.tree, ids)
			block['certificate'] = {
				'sigma': entry.sigma,
				'energy': entry.energy,
				'shadow': entry.shadow,
				'threshold': entry.sigma ** 2 / 4 * entry.shadow,
				'verified': entry.verifies(),
			}
			if entry.overlap is not None:
				block['overlap'] = tree_document(entry.overlap, ids)
			trees.append(block)
		rounds.append({'sigma': sigma_round.sigma, 'trees': trees, 'residual_size': sigma_round.residual_size})
	return {
		'mode': forest.mode,
		'sigma0': forest.sigma0,
		'exact': forest.exact,
		'rounds': rounds,
		'residual': [ids[tile] for tile in forest.residual],
	}

import math

import pandas as pd

from core_service.helpers import fraction_pair, load_json, parse_fraction, parse_int_list
from core_service.management.base import LabCommand
from direction_service.serializers import load_direction_set
from spectral_service.converters import read_field

from tiles_service.packets import packet_coefficients
from tiles_service.serializers import (
	TileSetSerializer, coefficient_frame, forest_document, load_tile_set, read_coefficients, tile_ids,
	tree_document
)
from tiles_service.services import greedy_size_decompose, model_sum, square_ops
from tiles_service.tiles import build_tile_set
from tiles_service.trees import Tree, saturate_conical, shadow_area, tree_size


class Command(LabCommand):
	name = 'tiles'
	help = "Phase-plane experiments: tiles, wave-packet coefficients, trees and model sums."
	actions = {
		'build': "Every tile over the ambient square for the given scales.",
		'coeffs': "Wave-packet coefficients ⟨f, φ_s⟩ of a field.",
		'decompose': "Greedy size decomposition into σ-indexed forests.",
		'saturate': "Saturation of a conical tree inside a tile set.",
		'modelsum': "Model sum maximal field and the square operators SQ and SC.",
	}

	def arguments_build(self, parser):
		parser.add_argument('--ann', required=True, help="annulus exponents e (ann = 4^e), comma separated")
		parser.add_argument('--levels', required=True, help="arc levels ℓ (|ω| = 2^-ℓ), comma separated")
		parser.add_argument('--side', default='1', help="ambient square side as p/q")

	def arguments_coeffs(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--tiles', required=True, help="tile set JSON")

	def arguments_decompose(self, parser):
		parser.add_argument('--tiles', required=True, help="tile set JSON")
		parser.add_argument('--coefficients', required=True, help="id,re,im CSV")
		parser.add_argument('--mode', choices=['lacunary', 'conical'], default='lacunary')

	def arguments_saturate(self, parser):
		parser.add_argument('--tiles', required=True, help="tile set JSON (the ambient family)")
		parser.add_argument('--tree', required=True, help="ids of the conical tree, comma separated")
		parser.add_argument('--coefficients', default=None, help="id,re,im CSV (adds sizes)")

	def arguments_modelsum(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--tiles', required=True, help="tile set JSON")
		parser.add_argument('--directions', required=True, help="direction set JSON")

	def handle_build(self, params):
		side = parse_fraction(params['side'])
		tiles = build_tile_set(parse_int_list(params['ann']), parse_int_list(params['levels']), side)
		self.write_json('tiles.json', TileSetSerializer.document(tiles, side))

	def handle_coeffs(self, params):
		f = read_field(params['input'])
		tiles, _ = load_tile_set(load_json(params['tiles']))
		coefficients, skipped = packet_coefficients(f, tiles)
		self.write_csv('coefficients.csv', coefficient_frame(coefficients, tiles))
		ids = tile_ids(tiles)
		self.write_json('skipped.json', {
			'resolved': len(coefficients),
			'skipped': [{'id': ids[tile], 'tile': str(tile), 'reason': reason} for tile, reason in skipped],
		})

	def handle_decompose(self, params):
		tiles, _ = load_tile_set(load_json(params['tiles']))
		coefficients = read_coefficients(params['coefficients'], tiles)
		forest = greedy_size_decompose(tiles, coefficients, params['mode'])
		self.write_json('forest.json', forest_document(forest, tiles))
		total = math.fsum(abs(value) ** 2 for value in coefficients.values())
		self.write_csv('rounds.csv', pd.DataFrame([
			{
				'sigma': sigma_round.sigma,
				'trees': len(sigma_round.trees),
				'shadow_sum': math.fsum(entry.shadow for entry in sigma_round.trees),
				'bessel_bound': 4 * total / sigma_round.sigma ** 2,
				'residual_size': sigma_round.residual_size,
			}
			for sigma_round in forest.rounds
		], columns=['sigma', 'trees', 'shadow_sum', 'bessel_bound', 'residual_size']))

	def handle_saturate(self, params):
		tiles, _ = load_tile_set(load_json(params['tiles']))
		chosen = []
		for index in parse_int_list(params['tree']):
			if not 0 <= index < len(tiles):
				raise ValueError(f"unknown tile id {index}")
			chosen.append(tiles[index])
		saturation = saturate_conical(Tree.of(chosen, 'conical'), tiles)
		ids = tile_ids(tiles)
		payload = {
			'core': tree_document(saturation.core, ids),
			'overlap': tree_document(saturation.overlap, ids) if saturation.overlap else None,
			'core_shadow': shadow_area(saturation.core.tiles),
			'shadow_ratio': saturation.shadow_ratio,
		}
		if params.get('coefficients'):
			coefficients = read_coefficients(params['coefficients'], tiles)
			payload['core_size'] = tree_size(saturation.core, coefficients)
			if saturation.overlap:
				payload['overlap_size'] = tree_size(saturation.overlap, coefficients)
		self.write_json('saturation.json', payload)

	def handle_modelsum(self, params):
		f = read_field(params['input'])
		tiles, _ = load_tile_set(load_json(params['tiles']))
		V = load_direction_set(load_json(params['directions']))
		_, maximal = model_sum(f, tiles, V)
		sq, sc = square_ops(f, tiles, V)
		self.write_field('maximal.dsf', maximal)
		self.write_field('sq.dsf', sq)
		self.write_field('sc.dsf', sc)
		self.write_json('directions.json', {'N': V.N, 'angles': [fraction_pair(angle) for angle in V.angles]})

import numpy as np
import pandas as pd

from core_service.helpers import fraction_pair, load_json, seeded_rng
from core_service.management.base import LabCommand
from spectral_service.converters import read_field

from bmo_service.haar import haar_delta1, haar_delta12
from bmo_service.serializers import load_coefficients
from bmo_service.services import (
	jn_level_set_profile, product_size, random_coefficients, sb_square_function, shadow_area,
	shadow_mask, wave_packet_sum
)


class Command(LabCommand):
	name = 'bmo'
	help = "Product-BMO experiments on dyadic rectangle coefficient families."
	actions = {
		'size': "Size functional and shadow of a coefficient family.",
		'jn-profile': "Level-set profile of the wave-packet sum and its decay fits.",
		'delta12': "Haar martingale square functions of a field or of a wave-packet sum.",
	}

	def arguments_size(self, parser):
		parser.add_argument('--input', required=True, help="coefficient family JSON")
		parser.add_argument('--sb', action='store_true', help="also write the rasterized SB field")

	def arguments_jn_profile(self, parser):
		parser.add_argument('--input', default=None, help="coefficient family JSON (default: random families)")
		parser.add_argument('--trials', type=int, default=100, help="random families when no input is given")
		parser.add_argument('--count', type=int, default=10, help="rectangles per random family")
		parser.add_argument('--depth', type=int, default=3, help="finest scale 2^-depth of random rectangles")
		parser.add_argument('--points', type=int, default=64, help="λ-grid size")

	def arguments_delta12(self, parser):
		parser.add_argument('--input', default=None, help="DSF1 field")
		parser.add_argument('--coefficients', default=None, help="coefficient family JSON (analyses B_R)")
		parser.add_argument('--delta1', action='store_true', help="also write the one-parameter Δ₁ field")

	def handle_size(self, params):
		C = load_coefficients(load_json(params['input']))
		estimate = product_size(C)
		payload = estimate.as_dict()
		payload['entries'] = len(C)
		payload['shadow'] = fraction_pair(shadow_area(C))
		payload['energy'] = float(np.sum(np.abs(C.values) ** 2))
		self.write_json('size.json', payload)
		if params.get('sb'):
			self.write_field('sb.dsf', sb_square_function(C))

	def handle_jn_profile(self, params):
		points = int(params['points'])
		if params.get('input'):
			profile = jn_level_set_profile(load_coefficients(load_json(params['input'])), points=points)
			self.write_csv('profile.csv', pd.DataFrame(profile.rows()))
			self.write_json('fit.json', profile.summary())
			return

		rng = seeded_rng(self.seed)
		rows = []
		for trial in range(int(params['trials'])):
			C = random_coefficients(rng, int(params['count']), int(params['depth']))
			C = C.scaled(1 / product_size(C).value)
			profile = jn_level_set_profile(C, points=points)
			rows.append({'trial': trial, **profile.summary()})
		frame = pd.DataFrame(rows)
		positive = frame['sqrt_rate'].fillna(0) > 0
		self.write_csv('trials.csv', frame)
		self.write_json('fit.json', {
			'trials': len(frame),
			'positive_sqrt_rate': int(positive.sum()),
			'positive_fraction': float(positive.mean()),
		})

	def handle_delta12(self, params):
		if bool(params.get('input')) == bool(params.get('coefficients')):
			raise ValueError("give exactly one of --input and --coefficients")
		if params.get('input'):
			f = read_field(params['input'])
		else:
			C = load_coefficients(load_json(params['coefficients']))
			raster = C.default_raster()
			f = wave_packet_sum(C, raster)
			sb = sb_square_function(C, raster)
			self.write_field('sb.dsf', sb)
		delta = haar_delta12(f)
		self.write_field('delta12.dsf', delta)
		if params.get('delta1'):
			self.write_field('delta1.dsf', haar_delta1(f))
		if params.get('coefficients'):
			inside = shadow_mask(C, raster)
			values, bound = delta.data.real, sb.data.real
			ratio = np.divide(values, bound, out=np.zeros_like(values), where=bound > 0)
			self.write_json('ratio.json', {
				'max_ratio': float(ratio[inside].max(initial=0.0)),
				'max_outside_shadow': float(values[~inside].max(initial=0.0)),
			})

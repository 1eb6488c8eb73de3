import numpy as np

from core_service.helpers import parse_int_list, seeded_rng
from core_service.management.base import LabCommand
from spectral_service.converters import field_digest, read_field
from spectral_service.grid import GridField


class Command(LabCommand):
	name = 'field'
	help = "Generate DSF1 fields and report on existing ones."
	actions = {
		'gen': "Generate a ball extremizer, random, pure-mode or constant field.",
		'info': "Resolution, side, norms and digest of a DSF1 field.",
	}

	def arguments_gen(self, parser):
		parser.add_argument('--kind', choices=['ball', 'random', 'mode', 'constant'], required=True)
		parser.add_argument('--n', type=int, default=64, help="grid resolution (power of two)")
		parser.add_argument('--side', type=float, default=1.0, help="period length")
		parser.add_argument('--radius', type=float, default=None, help="ball radius (default side/16)")
		parser.add_argument('--remove-mean', action='store_true', help="ball: subtract the mean")
		parser.add_argument('--k', default='1,0', help="mode: integer frequency k1,k2")
		parser.add_argument('--value', type=float, default=1.0, help="constant value")
		parser.add_argument('--complex', action='store_true', help="random: complex samples")
		parser.add_argument('--name', default='field.dsf')

	def arguments_info(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")

	def handle_gen(self, params):
		from norm_service.certificates import extremizer_ball

		n, side, kind = int(params['n']), float(params['side']), params['kind']
		if kind == 'ball':
			f = extremizer_ball(n, side, params.get('radius'), remove_mean=bool(params.get('remove_mean')))
		elif kind == 'random':
			rng = seeded_rng(self.seed)
			data = rng.standard_normal((n, n))
			if params.get('complex'):
				data = data + 1j * rng.standard_normal((n, n))
			f = GridField(n, side, data)
		elif kind == 'mode':
			k1, k2 = parse_int_list(params['k'])
			i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
			f = GridField(n, side, np.exp(2j * np.pi * (k1 * i + k2 * j) / n))
		else:
			f = GridField(n, side, np.full((n, n), float(params['value'])))
		self.write_field(params['name'], f)

	def handle_info(self, params):
		f = read_field(params['input'])
		self.write_json('info.json', {
			'n': f.n,
			'side': f.side,
			'l2': f.l2(),
			'l2_scaled': f.l2() * f.cell,
			'mean': [f.mean().real, f.mean().imag],
			'real': f.is_real(),
			'sha256': field_digest(f),
		})

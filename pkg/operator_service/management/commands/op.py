import numpy as np
import pandas as pd

from core_service.helpers import load_json, parse_fraction
from core_service.management.base import LabCommand
from direction_service.serializers import load_direction_set
from spectral_service.converters import read_field

from operator_service.cones import (
	ConePartition, cone_project, cone_square_function, even_odd_split,
	lacunary_arc_partition, partial_cone_maximal, smooth_cone_project
)
from operator_service.multipliers import MultiplierSpec
from operator_service.serializers import load_operator
from operator_service.services import (
	active_scales, lacunary_square_function, lp_piece, lp_square_function, maximal_directional
)


class Command(LabCommand):
	name = 'op'
	help = "Apply directional operators, cone projections and square functions to DSF1 fields."
	actions = {
		'apply': "Apply an operator descriptor to a field.",
		'maximal': "Maximal directional operator over a direction set.",
		'cone': "Cone projections over a partition of the circle.",
		'lp': "Littlewood-Paley pieces and their square function.",
		'sq': "Lacunary square function (Σ_k |T_V S_k f|²)^{1/2}.",
	}

	def arguments_apply(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--operator', required=True, help="operator descriptor JSON")
		parser.add_argument('--modulus', action='store_true', help="write |Tf| instead of Tf")
		parser.add_argument('--name', default='result.dsf')

	def arguments_maximal(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--directions', required=True, help="direction set JSON")
		parser.add_argument('--m', default='sign', help="sign or annulus_bump:k")
		parser.add_argument('--argmax', action='store_true', help="also write the argmax direction index table")
		parser.add_argument('--name', default='result.dsf')

	def arguments_cone(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--partition', default=None, help="uniform:M or lacunary:node:depth")
		parser.add_argument('--directions', default=None, help="lacunary direction set JSON (partition from its certificate)")
		parser.add_argument(
			'--mode', choices=['project', 'smooth', 'square', 'even-odd', 'partial'], default='project'
		)

	def arguments_lp(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--pieces', action='store_true', help="also write every S_k f")

	def arguments_sq(self, parser):
		parser.add_argument('--input', required=True, help="DSF1 field")
		parser.add_argument('--directions', required=True, help="direction set JSON")
		parser.add_argument('--m', default='sign', help="sign or annulus_bump:k")

	def handle_apply(self, params):
		f = read_field(params['input'])
		spec = load_operator(load_json(params['operator']))
		result = spec(f, workers=self.threads)
		if params.get('modulus'):
			result = result.with_data(np.abs(result.data))
		self.write_field(params['name'], result)
		self.write_json('operator.json', spec.descriptor())

	def handle_maximal(self, params):
		f = read_field(params['input'])
		V = load_direction_set(load_json(params['directions']))
		m = MultiplierSpec.parse(params['m'])
		result, argmax = maximal_directional(f, V, m, return_argmax=True, workers=self.threads)
		self.write_field(params['name'], result)
		if params.get('argmax'):
			rows, cols = np.indices(argmax.shape)
			self.write_csv('argmax.csv', pd.DataFrame({
				'i': rows.ravel(), 'j': cols.ravel(), 'direction': argmax.ravel(),
			}))

	def _partition(self, params):
		if params.get('directions'):
			V = load_direction_set(load_json(params['directions']))
			return lacunary_arc_partition(V)
		spec = params.get('partition') or 'uniform:4'
		kind, _, rest = spec.partition(':')
		if kind == 'uniform':
			return ConePartition.uniform(int(rest))
		if kind == 'lacunary':
			node, _, depth = rest.partition(':')
			return ConePartition.lacunary(parse_fraction(node), int(depth))
		raise ValueError(f"unknown partition '{spec}'")

	def handle_cone(self, params):
		f = read_field(params['input'])
		partition = self._partition(params)
		mode = params['mode']
		arcs = partition.arcs
		summary = {'boundaries': [str(value) for value in partition.boundaries], 'mode': mode, 'arcs': []}
		if mode in ('project', 'smooth'):
			for index, arc in enumerate(arcs):
				piece = cone_project(f, arc) if mode == 'project' else smooth_cone_project(f, arc)
				self.write_field(f"cone_{index:03d}.dsf", piece)
				summary['arcs'].append({'arc': str(arc), 'l2': piece.l2()})
		elif mode == 'square':
			self.write_field('square.dsf', cone_square_function(f, partition))
		elif mode == 'even-odd':
			even, odd = even_odd_split(f, partition)
			self.write_field('even.dsf', even)
			self.write_field('odd.dsf', odd)
		else:
			self.write_field('partial.dsf', partial_cone_maximal(f, partition))
		self.write_json('cones.json', summary)

	def handle_lp(self, params):
		f = read_field(params['input'])
		rows = []
		for k in active_scales(f):
			piece = lp_piece(f, k)
			rows.append({'k': k, 'l2': piece.l2()})
			if params.get('pieces'):
				self.write_field(f"lp_{k:+d}.dsf", piece)
		square = lp_square_function(f)
		self.write_field('square.dsf', square)
		self.write_csv('scales.csv', pd.DataFrame(rows, columns=['k', 'l2']))

	def handle_sq(self, params):
		f = read_field(params['input'])
		V = load_direction_set(load_json(params['directions']))
		m = MultiplierSpec.parse(params['m'])
		result = lacunary_square_function(f, V, m, workers=self.threads)
		self.write_field('square.dsf', result)
		norm = f.l2()
		self.write_json('ratio.json', {
			'N': V.N,
			'family': V.family,
			'ratio': result.l2() / norm if norm else None,
		})

from core_service.helpers import fraction_pair, load_json, parse_fraction
from core_service.management.base import LabCommand

from direction_service.serializers import DirectionSetSerializer, certificate_document, load_direction_set
from direction_service.services import (
	extract_lacunary_subsequence, gen_cantor, gen_lacunary, gen_uniform,
	longest_lacunary_estimate, vargas_constant_estimate
)


class Command(LabCommand):
	name = 'dirs'
	help = "Generate and analyze direction sets."
	actions = {
		'gen': "Generate a uniform, lacunary or cantor direction set.",
		'analyze': "Lacunary extraction, longest lacunary estimate and Vargas constant.",
	}

	def arguments_gen(self, parser):
		parser.add_argument('--family', choices=['uniform', 'lacunary', 'cantor'], required=True)
		parser.add_argument('--N', type=int, default=8, help="uniform/lacunary size")
		parser.add_argument('--ratio', default='1/2', help="lacunary ratio p/q in (0, 1/2]")
		parser.add_argument('--node', default='0', help="lacunary node p/q")
		parser.add_argument('--q', type=int, default=3, help="cantor base")
		parser.add_argument('--n', type=int, default=2, help="cantor depth")
		parser.add_argument('--name', default='directions.json')

	def arguments_analyze(self, parser):
		parser.add_argument('--input', required=True, help="direction set JSON")
		parser.add_argument('--resolution', type=int, default=64, help="node grid resolution")

	def handle_gen(self, params):
		family = params['family']
		if family == 'uniform':
			V = gen_uniform(int(params['N']))
		elif family == 'lacunary':
			V = gen_lacunary(parse_fraction(params['ratio']), int(params['N']), parse_fraction(params['node']))
		else:
			V = gen_cantor(int(params['q']), int(params['n']))
		self.write_json(params['name'], DirectionSetSerializer.document(V))

	def handle_analyze(self, params):
		V = load_direction_set(load_json(params['input']))
		report = {'N': V.N, 'family': V.family}
		if V.N >= 2:
			report['extracted'] = certificate_document(V, extract_lacunary_subsequence(V))
			length, certificate = longest_lacunary_estimate(V, int(params['resolution']))
			report['longest'] = certificate_document(V, certificate)
			report['longest']['lower_bound'] = True
			report['vargas_constant'] = fraction_pair(vargas_constant_estimate(V, int(params['resolution'])))
		self.write_json('analysis.json', report)

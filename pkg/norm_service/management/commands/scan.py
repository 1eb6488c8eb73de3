import pandas as pd

from core_service.helpers import parse_fraction, parse_int_list
from core_service.management.base import LabCommand

from norm_service.exports import write_workbook
from norm_service.services import FAMILIES, OPERATORS, growth_scan, refinement_gate

SCAN_COLUMNS = ['family', 'N', 'p', 'operator', 'ratio', 'witness_hash', 'grid_n']


class Command(LabCommand):
	name = 'scan'
	help = "Operator-norm lower-bound certificates and growth laws in N."
	actions = {
		'norms': "Certificates for every N of a direction family, with log, √log and power fits.",
	}

	def arguments_norms(self, parser):
		parser.add_argument('--family', choices=FAMILIES, required=True)
		parser.add_argument('--N', dest='N', required=True, help="direction counts, comma separated and increasing")
		parser.add_argument('--p', default='2', help="exponent as p/q (e.g. 4/3)")
		parser.add_argument('--op', dest='operator', choices=sorted(OPERATORS), default='hilbert')
		parser.add_argument('--n', type=int, default=512, help="grid resolution")
		parser.add_argument('--iterations', type=int, default=2, help="outer alternating-maximization steps (0 disables)")
		parser.add_argument('--side', default='1')
		parser.add_argument('--gate', action='store_true', help="also run the n/2n refinement gate at the largest N")
		parser.add_argument('--xlsx', action='store_true', help="also write scan.xlsx")
		parser.add_argument('--record', action='store_true', help="store the scan in the database")
		parser.add_argument('--queue', action='store_true', help="hand the scan to the django-q cluster instead")

	def handle_norms(self, params):
		scan_params = {
			'family': params['family'],
			'N_list': parse_int_list(params['N']),
			'p': float(parse_fraction(params['p'])),
			'operator': params['operator'],
			'n': int(params['n']),
			'seed': self.seed,
			'iterations': int(params['iterations']),
			'side': float(parse_fraction(params['side'])),
			'workers': self.threads,
		}
		if params.get('queue'):
			from norm_service.tasks import queue_growth_scan

			task_id = queue_growth_scan(scan_params)
			self.write_json('queued.json', {'task': task_id, 'params': scan_params})
			return

		scan = growth_scan(**scan_params)
		for point in scan.points:
			point.certificate.witness_path = self.write_field(f"witness_{point.N}.dsf", point.certificate.witness).name
		self.write_csv('scan.csv', pd.DataFrame(scan.rows(), columns=SCAN_COLUMNS))
		self.write_json('scan.json', scan.as_dict())

		if params.get('gate') and scan.points:
			gate = refinement_gate(
				scan.family, scan.points[-1].N, scan.n, scan.p, scan.operator, scan_params['side'], workers=self.threads
			)
			self.write_json('gate.json', gate.as_dict())
		if params.get('xlsx'):
			self.register_output(write_workbook(scan, self.output_path('scan.xlsx')))
		if params.get('record'):
			from norm_service.models import GrowthScanRecord

			GrowthScanRecord.store(scan)

import logging

from django_q.tasks import async_task

from .models import GrowthScanRecord
from .services import growth_scan

logger = logging.getLogger(__name__)

SCAN_PARAMETERS = ('family', 'N_list', 'p', 'operator', 'n', 'seed', 'iterations', 'side', 'workers')


def run_growth_scan(params):
	'''Worker entry point: run a growth scan from plain parameters and store it. Returns the record id.'''
	scan = growth_scan(**{key: params[key] for key in SCAN_PARAMETERS if key in params})
	record = GrowthScanRecord.store(scan)
	logger.info(f"Stored growth scan {record.id}: {record}")
	return record.id


def handle_scan_result(task):
	if task.success:
		logger.info(f"Growth scan task completed successfully: {task.id}")
	else:
		logger.error(f"Growth scan task failed: {task.id}, Error: {task.result}")


def queue_growth_scan(params):
	'''Hand a growth scan to the django-q cluster and return the task id.'''
	return async_task(
		'norm_service.tasks.run_growth_scan',
		params,
		hook='norm_service.tasks.handle_scan_result',
		q_options={
			'task_name': f"Growth-Scan-{params['family']}-{params['operator']}-p{params['p']}",
		},
	)

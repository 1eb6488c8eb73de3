from django.db import models


class ExperimentRun(models.Model):
	'''
		One completed lab run, as recorded by LabCommand after its manifest
		has been written.
	'''
	command = models.CharField(max_length=64, verbose_name="Command")
	config_hash = models.CharField(max_length=64, db_index=True, verbose_name="Config Hash")
	# u64 seeds do not fit a signed bigint
	seed = models.CharField(max_length=20, default='0')
	output_dir = models.CharField(max_length=512)
	wall_time = models.FloatField(default=0.0, help_text="Seconds")
	created_at = models.DateTimeField(auto_now_add=True)
	metadata = models.JSONField(default=dict, blank=True, help_text="Manifest file list and versions")

	class Meta:
		verbose_name = "Experiment Run"
		verbose_name_plural = "Experiment Runs"
		ordering = ['-created_at']

	def __str__(self):
		return f"{self.command} [{self.config_hash[:12]}]"

from django.db import models, transaction


class GrowthScanRecord(models.Model):
	'''A stored growth scan: fitted models and winner, one certificate per N.'''
	family = models.CharField(max_length=16, verbose_name="Direction Family")
	operator = models.CharField(max_length=16, verbose_name="Operator")
	p = models.FloatField(default=2.0)
	grid_n = models.PositiveIntegerField(verbose_name="Grid Resolution")
	winner = models.CharField(max_length=16, default='undefined')
	loglog_slope = models.FloatField(null=True, blank=True)
	created_at = models.DateTimeField(auto_now_add=True)
	metadata = models.JSONField(default=dict, blank=True, help_text="Fits and skipped N")

	class Meta:
		verbose_name = "Growth Scan"
		verbose_name_plural = "Growth Scans"
		ordering = ['-created_at']

	def __str__(self):
		return f"{self.family}/{self.operator} p={self.p:g} ({self.winner})"

	@classmethod
	def store(cls, scan):
		with transaction.atomic():
			record = cls.objects.create(
				family=scan.family,
				operator=scan.operator,
				p=scan.p,
				grid_n=scan.n,
				winner=scan.winner,
				loglog_slope=scan.loglog_slope,
				metadata={'fits': scan.fits, 'skipped': scan.skipped},
			)
			NormCertificateRecord.objects.bulk_create([
				NormCertificateRecord.of(point.certificate, N=point.N, scan=record)
				for point in scan.points
			])
		return record


class NormCertificateRecord(models.Model):
	scan = models.ForeignKey(GrowthScanRecord, null=True, blank=True, on_delete=models.CASCADE, related_name='certificates')
	N = models.PositiveIntegerField(null=True, blank=True)
	p = models.FloatField()
	ratio = models.FloatField()
	weak = models.BooleanField(default=False)
	witness_hash = models.CharField(max_length=64, db_index=True, verbose_name="Witness SHA-256")
	witness_path = models.CharField(max_length=512, blank=True, default='')
	created_at = models.DateTimeField(auto_now_add=True)
	metadata = models.JSONField(default=dict, blank=True, help_text="Operator descriptor and grid")

	class Meta:
		verbose_name = "Norm Certificate"
		verbose_name_plural = "Norm Certificates"
		ordering = ['-created_at']

	def __str__(self):
		return f"ratio {self.ratio:.6g} [{self.witness_hash[:12]}]"

	@classmethod
	def of(cls, certificate, N=None, scan=None):
		return cls(
			scan=scan,
			N=N,
			p=certificate.p,
			ratio=certificate.ratio,
			weak=certificate.weak,
			witness_hash=certificate.witness_hash,
			witness_path=certificate.witness_path or '',
			metadata={'operator': certificate.operator, 'grid': certificate.grid, 'converged': certificate.converged},
		)

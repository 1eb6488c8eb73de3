import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

	initial = True

	dependencies = []

	operations = [
		migrations.CreateModel(
			name='GrowthScanRecord',
			fields=[
				('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
				('family', models.CharField(max_length=16, verbose_name='Direction Family')),
				('operator', models.CharField(max_length=16, verbose_name='Operator')),
				('p', models.FloatField(default=2.0)),
				('grid_n', models.PositiveIntegerField(verbose_name='Grid Resolution')),
				('winner', models.CharField(default='undefined', max_length=16)),
				('loglog_slope', models.FloatField(blank=True, null=True)),
				('created_at', models.DateTimeField(auto_now_add=True)),
				('metadata', models.JSONField(blank=True, default=dict, help_text='Fits and skipped N')),
			],
			options={
				'verbose_name': 'Growth Scan',
				'verbose_name_plural': 'Growth Scans',
				'ordering': ['-created_at'],
			},
		),
		migrations.CreateModel(
			name='NormCertificateRecord',
			fields=[
				('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
				('N', models.PositiveIntegerField(blank=True, null=True)),
				('p', models.FloatField()),
				('ratio', models.FloatField()),
				('weak', models.BooleanField(default=False)),
				('witness_hash', models.CharField(db_index=True, max_length=64, verbose_name='Witness SHA-256')),
				('witness_path', models.CharField(blank=True, default='', max_length=512)),
				('created_at', models.DateTimeField(auto_now_add=True)),
				('metadata', models.JSONField(blank=True, default=dict, help_text='Operator descriptor and grid')),
				('scan', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='certificates', to='norm_service.growthscanrecord')),
			],
			options={
				'verbose_name': 'Norm Certificate',
				'verbose_name_plural': 'Norm Certificates',
				'ordering': ['-created_at'],
			},
		),
	]

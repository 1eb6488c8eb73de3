from django.db import migrations, models


class Migration(migrations.Migration):

	initial = True

	dependencies = []

	operations = [
		migrations.CreateModel(
			name='ExperimentRun',
			fields=[
				('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
				('command', models.CharField(max_length=64, verbose_name='Command')),
				('config_hash', models.CharField(db_index=True, max_length=64, verbose_name='Config Hash')),
				('seed', models.CharField(default='0', max_length=20)),
				('output_dir', models.CharField(max_length=512)),
				('wall_time', models.FloatField(default=0.0, help_text='Seconds')),
				('created_at', models.DateTimeField(auto_now_add=True)),
				('metadata', models.JSONField(blank=True, default=dict, help_text='Manifest file list and versions')),
			],
			options={
				'verbose_name': 'Experiment Run',
				'verbose_name_plural': 'Experiment Runs',
				'ordering': ['-created_at'],
			},
		),
	]

from django.apps import AppConfig


class SpectralServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'spectral_service'
	verbose_name = '1. Spectral Grid'

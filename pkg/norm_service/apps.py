from django.apps import AppConfig


class NormServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'norm_service'
	verbose_name = '6. Norm Lab'

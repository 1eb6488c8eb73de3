from django.apps import AppConfig


class OperatorServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'operator_service'
	verbose_name = '3. Directional Operators'

from django.apps import AppConfig


class BmoServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'bmo_service'
	verbose_name = '4. Product BMO'

from django.apps import AppConfig


class TilesServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'tiles_service'
	verbose_name = '5. Phase Plane'

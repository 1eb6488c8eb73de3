from django.apps import AppConfig


class DirectionServiceConfig(AppConfig):
	default_auto_field = 'django.db.models.BigAutoField'
	name = 'direction_service'
	verbose_name = '2. Direction Sets'

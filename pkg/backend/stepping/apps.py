from django.apps import AppConfig

class SteppingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'stepping'

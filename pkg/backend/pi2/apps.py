from django.apps import AppConfig

class Pi2Config(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'pi2'

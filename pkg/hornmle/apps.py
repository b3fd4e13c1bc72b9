from django.apps import AppConfig


class HornmleConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'hornmle'
    verbose_name = 'Rational MLE models'

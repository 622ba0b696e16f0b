from django.apps import AppConfig


class BlowupConfig(AppConfig):
    name = 'apps.blowup'
    verbose_name = 'Non-Newtonian blow-up toolkit'

from django.apps import AppConfig


class L1LensConfig(AppConfig):
    name = "l1lens"
    verbose_name = "L1 lens"

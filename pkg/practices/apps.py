from django.apps import AppConfig


class PracticesConfig(AppConfig):
    name         = "practices"
    verbose_name = "Social Practice Knowledge Base"

    def ready(self):
        # Register signal handlers
        import practices.signals  # noqa: F401

from .error_handlers import handle_command_error

__all__ = ["handle_command_error"]

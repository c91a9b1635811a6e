from .handle_cli_errors import handle_cli_errors, EXIT_INPUT, EXIT_INTERNAL
from .monitor_performance import monitor_performance, get_command_metrics, reset_metrics

__all__ = [
    'handle_cli_errors', 'EXIT_INPUT', 'EXIT_INTERNAL',
    'monitor_performance', 'get_command_metrics', 'reset_metrics'
]

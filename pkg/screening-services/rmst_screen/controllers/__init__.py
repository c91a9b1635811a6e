from .bench_controller import bench_command
from .iterate_controller import iterate_command
from .screen_controller import screen_command
from .simulate_controller import simulate_command

__all__ = ['bench_command', 'iterate_command', 'screen_command', 'simulate_command']

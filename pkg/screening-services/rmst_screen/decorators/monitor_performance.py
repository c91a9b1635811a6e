#!/usr/bin/env python3
"""
📊 Performance Monitoring Decorator
Wall-clock timing and call counts for CLI commands and long-running services.
"""

import logging
import time
from functools import wraps
from typing import Any, Dict, Optional

import numpy as np

logger = logging.getLogger(__name__)

# In-process metrics, keyed by function name
metrics_storage: Dict[str, Dict[str, Any]] = {}

SLOW_CALL_SECONDS = 300.0


def monitor_performance(f):
    """
    Performance monitoring decorator

    Tracks:
    - Call latency
    - Success/error counts
    - Error types
    """
    @wraps(f)
    def decorated_function(*args, **kwargs):
        start_time = time.perf_counter()
        name = f.__name__

        if name not in metrics_storage:
            metrics_storage[name] = {
                'total_calls': 0,
                'total_errors': 0,
                'total_time': 0.0,
                'min_time': float('inf'),
                'max_time': 0.0,
                'durations': [],
                'error_types': {}
            }
        metrics = metrics_storage[name]

        try:
            result = f(*args, **kwargs)
        except Exception as e:
            update_error_metrics(metrics, time.perf_counter() - start_time, e)
            raise

        duration = time.perf_counter() - start_time
        update_success_metrics(metrics, duration, name)
        logger.debug(f"⏱️ {name} finished in {duration:.2f}s")
        return result

    return decorated_function


def update_success_metrics(metrics: Dict[str, Any], duration: float, name: str):
    metrics['total_calls'] += 1
    metrics['total_time'] += duration
    metrics['min_time'] = min(metrics['min_time'], duration)
    metrics['max_time'] = max(metrics['max_time'], duration)

    metrics['durations'].append(duration)
    if len(metrics['durations']) > 1000:
        metrics['durations'] = metrics['durations'][-1000:]

    if duration > SLOW_CALL_SECONDS:
        logger.warning(f"🐢 Slow call detected: {name} took {duration:.1f}s")


def update_error_metrics(metrics: Dict[str, Any], duration: float, error: Exception):
    metrics['total_calls'] += 1
    metrics['total_errors'] += 1
    metrics['total_time'] += duration

    error_type = type(error).__name__
    metrics['error_types'][error_type] = metrics['error_types'].get(error_type, 0) + 1


def get_command_metrics(name: Optional[str] = None) -> Dict[str, Any]:
    """Summary per monitored function (or only those whose name contains `name`)"""
    if name:
        matching = {k: v for k, v in metrics_storage.items() if name in k}
    else:
        matching = metrics_storage

    summary = {}
    for key, metrics in matching.items():
        if metrics['total_calls'] == 0:
            continue

        entry = {
            'total_calls': metrics['total_calls'],
            'total_errors': metrics['total_errors'],
            'error_rate': metrics['total_errors'] / metrics['total_calls'],
            'avg_time_seconds': metrics['total_time'] / metrics['total_calls'],
            'min_time_seconds': metrics['min_time'] if metrics['min_time'] != float('inf') else 0.0,
            'max_time_seconds': metrics['max_time'],
            'error_types': dict(metrics['error_types'])
        }
        if metrics['durations']:
            p50, p90 = np.percentile(metrics['durations'], [50, 90])
            entry.update({'p50_time_seconds': float(p50), 'p90_time_seconds': float(p90)})

        summary[key] = entry

    return summary


def reset_metrics():
    """Reset all metrics (for testing)"""
    metrics_storage.clear()

#!/usr/bin/env python3
"""
🚨 CLI Error Handling Decorator
Maps library exceptions to process exit codes.

- InputError and invalid parameters → exit 2, message names the violation
- anything else → exit 1
"""

import logging
from functools import wraps

import click
from pydantic import ValidationError

from ..exceptions import InputError

logger = logging.getLogger(__name__)

EXIT_INTERNAL = 1
EXIT_INPUT = 2


def _describe_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        location = '.'.join(str(part) for part in item.get('loc', ())) or 'value'
        parts.append(f"{location}: {item.get('msg')}")
    return '; '.join(parts)


def handle_cli_errors(f):
    """Command error handler decorator"""
    @wraps(f)
    def decorated_function(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (click.exceptions.Exit, click.ClickException, click.Abort):
            raise
        except InputError as e:
            logger.error(f"❌ Input error: {e}")
            click.echo(f"Error: {e}", err=True)
            raise click.exceptions.Exit(EXIT_INPUT)
        except ValidationError as e:
            message = _describe_validation(e)
            logger.error(f"❌ Invalid parameters: {message}")
            click.echo(f"Error: invalid parameters: {message}", err=True)
            raise click.exceptions.Exit(EXIT_INPUT)
        except Exception as e:
            logger.error(f"💥 {f.__name__} failed: {e}", exc_info=True)
            click.echo(f"Error: {type(e).__name__}: {e}", err=True)
            raise click.exceptions.Exit(EXIT_INTERNAL)

    return decorated_function

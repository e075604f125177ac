from flask import current_app, jsonify

from dgsflow.errors import DgsError, NoMatch


def error_response(e):
    """JSON error envelope: 400 for validation errors, 409 when no plan matches, 500 otherwise."""
    if isinstance(e, DgsError):
        return jsonify(e.to_dict()), 409 if isinstance(e, NoMatch) else 400
    current_app.logger.exception('unhandled error')
    return jsonify({'success': False, 'error': str(e), 'error_type': type(e).__name__}), 500

import json
from datetime import datetime

from dgsflow.models.database import db


class RunRecord(db.Model):
    __tablename__ = 'runs'

    id = db.Column(db.Integer, primary_key=True)
    app = db.Column(db.String(40), nullable=False)
    mode = db.Column(db.String(20), nullable=False, default='simulated')
    seed = db.Column(db.Integer, nullable=False, default=0)
    config_json = db.Column(db.Text)
    plan_json = db.Column(db.Text)
    stats_json = db.Column(db.Text)
    outputs_json = db.Column(db.Text)
    outputs_count = db.Column(db.Integer, default=0)
    status = db.Column(db.String(20), nullable=False, default='completed')  # completed, deadlock, failed
    error = db.Column(db.Text)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    checkpoints = db.relationship('CheckpointEntry', backref='run', lazy=True, cascade='all, delete-orphan',
                                  order_by='CheckpointEntry.id')

    def __repr__(self):
        return f'<RunRecord {self.id} {self.app} {self.status}>'

    def to_dict(self, include_outputs=False):
        data = {
            'id': self.id,
            'app': self.app,
            'mode': self.mode,
            'seed': self.seed,
            'config': json.loads(self.config_json) if self.config_json else None,
            'plan': json.loads(self.plan_json) if self.plan_json else None,
            'stats': json.loads(self.stats_json) if self.stats_json else None,
            'outputs_count': self.outputs_count,
            'checkpoints_count': len(self.checkpoints),
            'status': self.status,
            'error': self.error,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }
        if include_outputs:
            data['outputs'] = json.loads(self.outputs_json) if self.outputs_json else []
        return data


class CheckpointEntry(db.Model):
    __tablename__ = 'checkpoints'

    id = db.Column(db.Integer, primary_key=True)
    run_id = db.Column(db.Integer, db.ForeignKey('runs.id'), nullable=False)
    worker = db.Column(db.String(40))
    o_value = db.Column(db.String(80), nullable=False)
    state_json = db.Column(db.Text, nullable=False)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f'<CheckpointEntry run={self.run_id} at {self.o_value}>'

    def to_dict(self):
        return {
            'id': self.id,
            'run_id': self.run_id,
            'worker': self.worker,
            'o_value': json.loads(self.o_value),
            'state': json.loads(self.state_json),
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }

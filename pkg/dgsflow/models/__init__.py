from dgsflow.models.database import db
from dgsflow.models.run_record import CheckpointEntry, RunRecord

__all__ = ['db', 'RunRecord', 'CheckpointEntry']

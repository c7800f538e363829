"""
Database models for the experiment run ledger
"""
from sqlalchemy import create_engine, Column, String, Integer, Float, DateTime, Text, ForeignKey
from sqlalchemy.orm import declarative_base, relationship, sessionmaker
from datetime import datetime
import config

Base = declarative_base()


class ExperimentRun(Base):
    """One execution of a named experiment"""
    __tablename__ = 'experiment_runs'

    id = Column(Integer, primary_key=True)
    experiment = Column(String(100), nullable=False, index=True)
    master_seed = Column(Integer, nullable=False)
    workers = Column(Integer, default=1)
    block_size = Column(Integer)

    # Parameters as key=value lines
    parameters = Column(Text)
    output_dir = Column(String(500))
    files = Column(Text)  # newline-separated

    passed = Column(Integer, default=0)
    failed = Column(Integer, default=0)
    errored = Column(Integer, default=0)

    created_at = Column(DateTime, default=datetime.utcnow)

    # Relationships
    criteria = relationship("CriterionRecord", back_populates="run", cascade="all, delete-orphan")


class CriterionRecord(Base):
    """Verdict of one criterion within a run"""
    __tablename__ = 'criterion_records'

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey('experiment_runs.id'), nullable=False)
    criterion = Column(String(50), index=True)
    description = Column(Text)
    value = Column(Float)
    tolerance = Column(Float)
    verdict = Column(String(10))
    detail = Column(Text)

    # Relationship
    run = relationship("ExperimentRun", back_populates="criteria")


# Database engine and session
engine = create_engine(config.DATABASE_URL, echo=False)
SessionLocal = sessionmaker(bind=engine)


def init_db():
    """Initialize database tables"""
    Base.metadata.create_all(engine)
    print("✅ Database initialized successfully")


def get_session():
    """Get database session"""
    return SessionLocal()

"""Orchestrator module"""

from .pipeline import orchestrator, PipelineOrchestrator

__all__ = ["orchestrator", "PipelineOrchestrator"]

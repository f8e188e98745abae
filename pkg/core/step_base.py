"""
Base class for all pipeline steps

All steps must inherit from StepBase and implement run().
This ensures a common interface for dynamic loading and execution.

How to add a new step:
1. Create a file in steps/ (e.g., my_step.py)
2. Import StepBase from core.step_base
3. Define `class Step(StepBase)` with a `title`
4. Implement run(self, context: RunContext) -> StepResult
5. Call it with: python run_analysis.py my_step

Example:
    class Step(StepBase):
        title = "MY STEP"

        def run(self, context):
            result = StepResult()
            frame = context.frame
            result.add_table('my_table', frame.groupby('state').size().reset_index(name='count'))
            return result
"""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from core.models import StepResult
from core.run_context import RunContext


class StepBase(ABC):
    """
    Base class for all pipeline steps

    Steps are pure orchestration:
    - read what they need from the RunContext (memoized corpus, resources)
    - call analysis kernels
    - return a StepResult; writing artifacts is the exporter's job

    Attributes:
        params: step-specific overrides (unused by the shipped steps)
        name: subcommand name (set by loader)
    """

    title = ""

    def __init__(self, params: Optional[Dict[str, Any]] = None):
        self.params = params or {}
        self.name = ""  # Set by loader

    @abstractmethod
    def run(self, context: RunContext) -> StepResult:
        """
        Execute the step

        Args:
            context: shared run state (config, console, memoized corpus)

        Returns:
            StepResult with tables (CSV), documents (JSON) and meta
            (counters, notices)
        """

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name='{self.name}')"

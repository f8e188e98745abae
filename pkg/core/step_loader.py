"""
Dynamic step loader

Loads step modules dynamically from steps/ by subcommand name.
"""

import importlib.util
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Type

from core.step_base import StepBase


PIPELINE = ["ingest", "clean", "volumes", "engagement", "geo", "topics", "sentiment", "events", "stats"]


class StepLoader:
    """
    Loads steps dynamically from module files

    Usage:
        loader = StepLoader()
        step = loader.load_step('engagement')
        result = step.run(context)
    """

    def __init__(self, steps_dir: Optional[str] = None):
        self.steps_dir = Path(steps_dir) if steps_dir else Path(__file__).resolve().parent.parent / "steps"
        self._cache: Dict[str, Type[StepBase]] = {}

    def load_step(self, name: str, params: Optional[Dict[str, Any]] = None) -> StepBase:
        """
        Load and instantiate a step

        Raises:
            FileNotFoundError: If module file not found
            AttributeError: If module doesn't have a Step class
            TypeError: If Step class doesn't inherit from StepBase
        """
        step = self._load_step_class(name)(params)
        step.name = name
        return step

    def _load_step_class(self, name: str) -> Type[StepBase]:
        module_file = name if name.endswith(".py") else f"{name}.py"

        if module_file in self._cache:
            return self._cache[module_file]

        module_path = self.steps_dir / module_file
        if not module_path.exists():
            raise FileNotFoundError(
                f"Step module not found: {module_path}\n"
                f"Available steps: {', '.join(PIPELINE)}"
            )

        module_name = f"steps.{module_path.stem}"
        spec = importlib.util.spec_from_file_location(module_name, module_path)
        if spec is None or spec.loader is None:
            raise ImportError(f"Failed to load module: {module_path}")

        module = importlib.util.module_from_spec(spec)
        sys.modules[module_name] = module
        spec.loader.exec_module(module)

        # Convention: classe "Step"
        if not hasattr(module, "Step"):
            raise AttributeError(
                f"Module {module_file} must define a class named 'Step'\n"
                f"Example:\n"
                f"  class Step(StepBase):\n"
                f"      def run(self, context):\n"
                f"          ..."
            )

        step_class = module.Step
        if not issubclass(step_class, StepBase):
            raise TypeError(
                f"Step class in {module_file} must inherit from StepBase\n"
                f"Example:\n"
                f"  from core.step_base import StepBase\n"
                f"  class Step(StepBase):\n"
                f"      ..."
            )

        self._cache[module_file] = step_class
        return step_class

    def clear_cache(self):
        self._cache.clear()

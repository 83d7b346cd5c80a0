"""
Exception Handling Utilities for the sketch-photo recognition pipeline

This module provides the exception hierarchy and centralized handling so the
data, training and evaluation code can raise plainly and the command line
surface can turn every failure into a stable exit code.
"""

import time
import traceback
from functools import wraps
from typing import Any, Callable, Optional

from .logging_utils import WorkflowLogger

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


class SketchRecognitionError(Exception):
    """Base exception class for the recognition pipeline."""
    exit_code = EXIT_UNEXPECTED


class ConfigError(SketchRecognitionError):
    """Invalid configuration, overrides, or command usage."""
    exit_code = EXIT_CONFIG


class ToyDatasetSpecError(ConfigError):
    """A toy dataset spec that cannot produce a recognition task."""


class DataError(SketchRecognitionError):
    """Missing, malformed or inconsistent input data."""
    exit_code = EXIT_DATA


class ManifestError(DataError):
    """Exception raised when a manifest line cannot be parsed."""
    def __init__(self, path: str, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"Malformed manifest {path} at line {line_number}: {reason}")


class PairingError(DataError):
    """Exception raised when photo/sketch records of an identity cannot be paired."""
    def __init__(self, identity: str, reason: str):
        self.identity = identity
        super().__init__(f"Cannot pair identity '{identity}': {reason}")


class AlignmentError(DataError):
    """Degenerate eye landmarks."""


class CropSizeError(DataError):
    """Crop window larger than the image."""


class ShapeError(DataError):
    """Tensor or image dimensions do not match what the operation expects."""


class GalleryError(DataError):
    """Duplicate mates or colliding distractor identities."""


class CheckpointError(DataError):
    """Exception raised when a checkpoint is unreadable or incomplete."""
    def __init__(self, path: str, reason: str, missing: Optional[list] = None):
        self.path = path
        self.missing = missing or []
        detail = f" ({', '.join(self.missing)})" if self.missing else ""
        super().__init__(f"Cannot load checkpoint {path}: {reason}{detail}")


class NumericError(SketchRecognitionError):
    """Non-finite values where finite ones are required."""
    exit_code = EXIT_NUMERIC


class ExceptionHandler:
    """Centralized exception handling for command execution."""

    @staticmethod
    def exit_code_for(error: BaseException) -> int:
        if isinstance(error, SketchRecognitionError):
            return error.exit_code
        return EXIT_UNEXPECTED

    @staticmethod
    def handle_pipeline_error(error: SketchRecognitionError, context: str = "") -> int:
        """Log a known pipeline error and return its exit code."""
        error_msg = str(error)
        if context:
            error_msg += f" (Context: {context})"
        WorkflowLogger.print_error(error_msg)
        WorkflowLogger.print_error(f"Error type: {type(error).__name__}")

        if isinstance(error, ConfigError):
            WorkflowLogger.print_info("Check the config file and --set overrides; the effective config is echoed above.")
        elif isinstance(error, CheckpointError) and error.missing:
            WorkflowLogger.print_info(f"Missing tensors: {', '.join(error.missing)}")
        elif isinstance(error, NumericError):
            WorkflowLogger.print_info("A loss or activation became non-finite. Try a lower learning rate.")

        return error.exit_code

    @staticmethod
    def handle_user_interruption() -> int:
        """Handle user interruption (Ctrl+C)."""
        WorkflowLogger.print_warning("Command interrupted by user")
        return EXIT_UNEXPECTED

    @staticmethod
    def handle_import_error(error: ImportError) -> int:
        """Handle import errors with helpful suggestions."""
        WorkflowLogger.print_error(f"Import error: {str(error)}")

        error_str = str(error).lower()
        if "torch" in error_str:
            WorkflowLogger.print_info("Install PyTorch: pip install torch")
        elif "cv2" in error_str:
            WorkflowLogger.print_info("Install OpenCV: pip install opencv-python-headless")
        elif "langgraph" in error_str:
            WorkflowLogger.print_info("Install LangGraph: pip install langgraph")
        else:
            WorkflowLogger.print_info("Make sure all dependencies are installed: pip install -r requirements.txt")
        return EXIT_UNEXPECTED

    @staticmethod
    def handle_general_exception(error: Exception, context: str = "") -> int:
        """Handle unexpected exceptions with context."""
        error_msg = f"Unexpected error occurred: {str(error)}"
        if context:
            error_msg += f" (Context: {context})"

        WorkflowLogger.print_error(error_msg)
        WorkflowLogger.print_error(f"Error type: {type(error).__name__}")
        WorkflowLogger.print_error("Full error traceback:")
        traceback.print_exc()
        return EXIT_UNEXPECTED


def safe_execute(operation_name: str = "operation"):
    """Decorator turning a command body into an exit code."""
    def decorator(func: Callable[..., Any]) -> Callable[..., int]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            with ErrorHandlingContext(operation_name) as ctx:
                result = func(*args, **kwargs)
                return EXIT_OK if result is None else int(result)
            return ctx.exit_code
        return wrapper
    return decorator


class ErrorHandlingContext:
    """Context manager for command execution with proper exception handling.

    Known pipeline errors are logged and suppressed; the resulting exit code
    is available as ``exit_code`` after the block.
    """

    def __init__(self, workflow_name: str):
        self.workflow_name = workflow_name
        self.start_time = None
        self.exit_code = EXIT_OK

    def __enter__(self):
        self.start_time = time.time()
        WorkflowLogger.print_info(f"Starting {self.workflow_name}...")
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None:
            duration = time.time() - self.start_time
            WorkflowLogger.print_success(f"{self.workflow_name} completed successfully in {duration:.2f}s")
            return False
        if issubclass(exc_type, KeyboardInterrupt):
            self.exit_code = ExceptionHandler.handle_user_interruption()
        elif issubclass(exc_type, ImportError):
            self.exit_code = ExceptionHandler.handle_import_error(exc_val)
        elif issubclass(exc_type, SketchRecognitionError):
            self.exit_code = ExceptionHandler.handle_pipeline_error(exc_val, self.workflow_name)
        elif issubclass(exc_type, Exception):
            self.exit_code = ExceptionHandler.handle_general_exception(exc_val, self.workflow_name)
        else:
            return False
        return True

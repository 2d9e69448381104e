"""
Logger Service
==============

This module implements a singleton logging service that provides:
1. Multi-level logging (debug, info, warning, error)
2. Dual output (file and console)
3. Structured interpolation logging
4. Raw payload archiving

Log files are organized in the configured directory (default 'logs'):
- singint_YYYYMMDD_HHMMSS.log: Main application log
- raw/payload_YYYYMMDD_HHMMSS_ffffff.json: Raw interpolation payloads
"""

import json
import logging
from datetime import datetime
from pathlib import Path

from app.utils.config import Config


class Logger:
    """
    Singleton logging service.

    File logging and payload archiving follow the `logging` section of
    the configuration; the console handler writes to stderr so command
    output on stdout stays machine readable.
    """
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Logger, cls).__new__(cls)
            cls._instance._setup_logging()
        return cls._instance

    def _setup_logging(self):
        """
        Initialize logging configuration.

        Sets up:
        1. Log directory structure (only when file logging is on)
        2. File and console handlers
        3. Log formatting
        """
        config = Config()
        self.logs_dir = Path(config.get("logging", "directory", "logs"))
        self.to_file = bool(config.get("logging", "to_file", True))
        self.raw_payloads = bool(config.get("logging", "raw_payloads", False))
        self.log_file = None

        self.logger = logging.getLogger('singint')
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)

        formatter = logging.Formatter('%(asctime)s - %(levelname)s - %(message)s')

        if self.to_file:
            self.logs_dir.mkdir(parents=True, exist_ok=True)
            self.log_file = self.logs_dir / f"singint_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
            file_handler = logging.FileHandler(self.log_file, encoding='utf-8')
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        console_handler.setLevel(config.get("logging", "console_level", "WARNING"))
        self.logger.addHandler(console_handler)

        if config.validation_error:
            self.logger.warning(f"Configuration fell back to defaults: {config.validation_error}")
        self.logger.debug(f"Logger initialized. Log file: {self.log_file or 'disabled'}")

    def info(self, message):
        self.logger.info(message)

    def debug(self, message):
        """Log a debug message (only visible in file logs)."""
        self.logger.debug(message)

    def warning(self, message):
        self.logger.warning(message)

    def error(self, message, exc_info=True):
        """Log an error message with optional exception info."""
        self.logger.error(message, exc_info=exc_info)

    def log_interpolation(self, conclusion, partition, result):
        """
        Log one interpolation with all details.

        This method logs:
        1. A summary line to the main log
        2. A detailed block (interpolant, witnesses, case trace) to the log file
        3. The raw payload as JSON when raw payload archiving is on

        Args:
            conclusion: The conclusion of the input derivation, as text
            partition: The partition, in the CLI partition syntax
            result: The InterpolationResult
        """
        from app.core.printer import format_derivation, format_formula

        interpolant = format_formula(result.interpolant)
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "conclusion": conclusion,
            "partition": partition,
            "interpolant": interpolant,
            "witness_one": format_derivation(result.witness_one),
            "witness_two": format_derivation(result.witness_two),
            "report": result.report.to_dict(),
            "trace": [{"path": path, "case": case} for path, case in result.trace],
        }

        self.logger.info(f"Interpolation: {conclusion} [{partition}] -> {interpolant}")

        if self.log_file is None:
            return
        with open(self.log_file, 'a', encoding='utf-8') as f:
            f.write(f"\n--- INTERPOLATION AT {log_entry['timestamp']} ---\n")
            f.write(f"CONCLUSION: {conclusion}\n")
            f.write(f"PARTITION: {partition}\n")
            f.write(f"INTERPOLANT: {interpolant}\n\n")
            f.write("CASES:\n")
            for step in log_entry["trace"]:
                f.write(f"  {step['path']}: {step['case']}\n")
            f.write("\nWITNESS I:\n")
            f.write(log_entry["witness_one"])
            f.write("\nWITNESS II:\n")
            f.write(log_entry["witness_two"])
            f.write("-" * 80 + "\n")

        if self.raw_payloads:
            self._log_raw_payload(log_entry)

    def _log_raw_payload(self, log_entry):
        """Save the complete payload as JSON, microsecond precision in the file name."""
        raw_logs_dir = self.logs_dir / 'raw'
        raw_logs_dir.mkdir(parents=True, exist_ok=True)

        timestamp = datetime.now().strftime('%Y%m%d_%H%M%S_%f')
        raw_log_file = raw_logs_dir / f"payload_{timestamp}.json"

        with open(raw_log_file, 'w', encoding='utf-8') as f:
            json.dump(log_entry, f, indent=2)

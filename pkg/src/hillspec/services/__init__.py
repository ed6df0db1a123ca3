"""Orchestration glue: pipeline, reports, worker pool and the self-test suite."""

"""Scripts for running the acceptance suite and analyzing reports."""

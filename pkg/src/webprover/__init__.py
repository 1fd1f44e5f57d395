"""Web-served interactive proof assistant: markup-aware script parsing,
hyperlink-driven disambiguation, traced automation, a statement-granular
HTTP+XML execution protocol, and a centralized versioned library."""

__all__ = ["kernel", "scriptlang", "disambiguator", "tactics", "oracle",
           "enricher", "executor", "libstore", "daemon", "stdlib"]

"""Layout pieces shared by the dashboard pages."""

from .page_layout import NAV_ITEMS, PageLayout, ThemeManager

__all__ = ["NAV_ITEMS", "PageLayout", "ThemeManager"]

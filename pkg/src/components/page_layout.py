"""Shared page frame of the results dashboard.

Header with the page title and results directory, a navigation drawer and a
per-user dark mode switch.
"""

from functools import wraps
from typing import Callable, Optional

from nicegui import app, ui

# Navigation entries (label, path, icon)
NAV_ITEMS: list[tuple[str, str, str]] = [
    ("Overview", "/", "dashboard"),
    ("Sweep", "/sweep", "table_chart"),
    ("Timeline", "/timeline", "timeline"),
]

PALETTE = {
    "primary": "#0f766e",
    "secondary": "#134e4a",
    "accent": "#5eead4",
    "positive": "#16a34a",
    "negative": "#c10015",
    "info": "#31ccec",
    "warning": "#f2c037",
    "dark": "#1d1d1d",
    "dark_page": "#121212",
}


class ThemeManager:
    """Dark mode preference kept in ``app.storage.user``."""

    def __init__(self):
        self._dark_mode: Optional[ui.dark_mode] = None

    @staticmethod
    def get_dark_mode() -> bool:
        return app.storage.user.get("dark_mode", True)

    @staticmethod
    def set_dark_mode(value: bool) -> None:
        app.storage.user["dark_mode"] = value

    def setup_dark_mode(self) -> ui.dark_mode:
        if self._dark_mode is None:
            self._dark_mode = ui.dark_mode(value=self.get_dark_mode())
        return self._dark_mode


class PageLayout:
    """Page decorator that wraps content in the dashboard frame.

    Example:
        ```python
        @PageLayout(title="Sweep")
        def sweep_page(layout):
            ui.label("content")
        ```
    """

    def __init__(
        self,
        title: str,
        subtitle: Optional[Callable[[], str]] = None,
        nav_items: Optional[list[tuple[str, str, str]]] = None,
    ):
        """
        Args:
            title: Text shown in the header.
            subtitle: Called at render time for the secondary header text.
            nav_items: (label, path, icon) entries of the drawer; defaults to NAV_ITEMS.
        """
        self.title = title
        self.subtitle = subtitle
        self.nav_items = nav_items or NAV_ITEMS
        self.drawer: Optional[ui.left_drawer] = None
        self.theme_manager: Optional[ThemeManager] = None

    def _nav_item(self, label: str, path: str, icon: str) -> None:
        with ui.link(target=path).classes("w-full no-underline"):
            with ui.row(align_items="center").classes(
                "gap-3 px-4 py-3 w-full rounded-lg hover:bg-gray-100 dark:hover:bg-gray-700 cursor-pointer group"
            ):
                ui.icon(icon).classes("text-gray-600 dark:text-gray-400 group-hover:text-primary").props("size=sm")
                ui.label(label).classes("text-gray-700 dark:text-gray-300 font-medium group-hover:text-primary")

    def render_navigation(self) -> None:
        for label, path, icon in self.nav_items:
            self._nav_item(label, path, icon)

        with ui.column().classes("mt-auto w-full"):
            ui.separator().classes("my-2")
            dark_mode = self.theme_manager.setup_dark_mode()

            def on_change(event):
                dark_mode.value = event.value
                ThemeManager.set_dark_mode(event.value)

            ui.switch("Dark mode", value=ThemeManager.get_dark_mode(), on_change=on_change).classes("px-3")

    def _setup_layout(self) -> None:
        self.theme_manager = ThemeManager()
        ui.colors(**PALETTE)

        # value=None lets Quasar show the drawer on wide screens only
        self.drawer = ui.left_drawer(value=None, top_corner=True, bottom_corner=True).props("bordered width=200")
        with self.drawer:
            with ui.column().classes("flex flex-col h-full gap-1 w-full pt-4"):
                self.render_navigation()

        with ui.header(elevated=True).classes("items-center justify-between"):
            ui.button(icon="menu", on_click=self.drawer.toggle).props("flat dense round color=white")
            ui.label(self.title).classes("text-xl font-bold")
            ui.label(self.subtitle() if self.subtitle else "").classes("text-sm opacity-80")

    def __call__(self, func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            self._setup_layout()
            return func(self, *args, **kwargs)

        wrapper.layout = self
        return wrapper

"""Plugin system for orbitqaoa."""

import importlib.util
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import pluggy

from orbitqaoa.utils import print_error, print_info

hookspec = pluggy.HookspecMarker("orbitqaoa")
hookimpl = pluggy.HookimplMarker("orbitqaoa")


class OrbitHookSpec:
    """Hook specification for orbitqaoa plugins."""

    @hookspec
    def orbitqaoa_pre_train(self, graph: Any, config: Any) -> None:
        """Called before a training run starts."""
        pass

    @hookspec
    def orbitqaoa_post_step(self, record: Any) -> None:
        """Called after every optimizer step with its StepRecord."""
        pass

    @hookspec
    def orbitqaoa_post_train(self, history: Any, summary: Any) -> None:
        """Called after a training run with its History and RunSummary."""
        pass

    @hookspec
    def orbitqaoa_add_commands(self) -> Dict[str, Callable]:
        """
        Add custom CLI commands.

        Returns:
            Dictionary mapping command names to Click command functions
        """
        pass

    @hookspec
    def orbitqaoa_report_filters(self) -> Dict[str, Callable]:
        """
        Add custom Jinja2 filters for summaries and sweep reports.

        Returns:
            Dictionary mapping filter names to filter functions
        """
        pass

    @hookspec
    def orbitqaoa_graph_models(self) -> Dict[str, Callable]:
        """
        Add graph models usable as ``model:`` in experiment files.

        Returns:
            Dictionary mapping model names to ``f(n, seed, **params) -> Graph``
        """
        pass


class PluginManager:
    """Plugin manager for orbitqaoa."""

    def __init__(self, plugin_dirs: Optional[List[Path]] = None):
        """
        Initialize plugin manager.

        Args:
            plugin_dirs: List of directories to search for plugins
        """
        self.pm = pluggy.PluginManager("orbitqaoa")
        self.pm.add_hookspecs(OrbitHookSpec)
        self._plugin_dirs = plugin_dirs or []
        self._loaded_plugins: Dict[str, Any] = {}

    def load_plugins(self) -> None:
        """Load all plugins from plugin directories."""
        for plugin_dir in self._plugin_dirs:
            if not plugin_dir.exists() or not plugin_dir.is_dir():
                continue
            self._load_plugins_from_dir(plugin_dir)

    def _load_plugins_from_dir(self, plugin_dir: Path) -> None:
        for plugin_file in sorted(plugin_dir.glob("*.py")):
            if plugin_file.name.startswith("_"):
                continue
            try:
                self._load_plugin_file(plugin_file)
            except Exception as e:
                print_error(f"Failed to load plugin {plugin_file.name}: {e}")

    def _load_plugin_file(self, plugin_file: Path) -> None:
        """
        Load a plugin from a Python file.

        A plugin file exposes either a ``register()`` function returning the
        hook implementation object, or an ``OrbitPlugin`` class.
        """
        plugin_name = plugin_file.stem
        if plugin_name in self._loaded_plugins:
            return

        spec = importlib.util.spec_from_file_location(plugin_name, plugin_file)
        if spec is None or spec.loader is None:
            return

        module = importlib.util.module_from_spec(spec)
        sys.modules[plugin_name] = module
        spec.loader.exec_module(module)

        if hasattr(module, "register"):
            plugin_instance = module.register()
        elif hasattr(module, "OrbitPlugin"):
            plugin_instance = module.OrbitPlugin()
        else:
            return
        self.register(plugin_instance, plugin_name)
        print_info(f"Loaded plugin: {plugin_name}")

    def register(self, plugin: Any, name: str) -> None:
        """Register an in-process hook implementation object."""
        self.pm.register(plugin, name=name)
        self._loaded_plugins[name] = plugin

    def call_hook(self, hook_name: str, **kwargs) -> List[Any]:
        """
        Call a plugin hook.

        Args:
            hook_name: Name of hook to call
            **kwargs: Hook arguments

        Returns:
            List of results from all plugin implementations
        """
        hook = getattr(self.pm.hook, hook_name, None)
        if hook is None:
            return []

        try:
            return hook(**kwargs)
        except Exception as e:
            print_error(f"Error calling hook {hook_name}: {e}")
            return []

    def _collect(self, hook_name: str) -> Dict[str, Callable]:
        merged: Dict[str, Callable] = {}
        for result in self.call_hook(hook_name):
            if result and isinstance(result, dict):
                merged.update(result)
        return merged

    def get_custom_commands(self) -> Dict[str, Callable]:
        return self._collect("orbitqaoa_add_commands")

    def get_report_filters(self) -> Dict[str, Callable]:
        return self._collect("orbitqaoa_report_filters")

    def get_graph_models(self) -> Dict[str, Callable]:
        return {name.lower(): fn for name, fn in self._collect("orbitqaoa_graph_models").items()}

    def list_plugins(self) -> List[str]:
        return list(self._loaded_plugins.keys())

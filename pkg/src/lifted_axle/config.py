from typing import List, Dict, Union, Any, Optional
import json

from .utils.exceptions import ConfigValueError

_MISSING = object()

class ConfigItem:
    """配置项基类"""
    def __init__(self,
                 type: str,
                 key: str,
                 title: str,
                 required: bool = False,
                 default: Any = None):
        self.type = type
        self.key = key
        self.title = title
        self.required = required
        self.default = default

    def to_dict(self) -> Dict:
        """转换为字典结构，自动包含子类所有属性"""
        base = {
            "type": self.type,
            "key": self.key,
            "title": self.title,
            "required": self.required,
            "default": self.default
        }
        instance_dict = vars(self).copy()
        for key in base:
            instance_dict.pop(key, None)
        return {k: v for k, v in {**base, **instance_dict}.items() if v is not None}

    def validate_value(self, value: Any) -> Any:
        """Check ``value`` and return it in canonical form."""
        raise NotImplementedError

class TextItem(ConfigItem):
    """文本类型配置项"""
    def __init__(self, key, title, **kwargs):
        super().__init__("text", key, title, **kwargs)

    def validate_value(self, value):
        if not isinstance(value, str):
            raise ConfigValueError(self.key, f"expected a string, got {type(value).__name__}")
        return value

class NumberItem(ConfigItem):
    """数字类型配置项

    ``min_inclusive``/``max_inclusive`` choose closed or open interval ends.
    """
    def __init__(self, key, title,
                 min: Union[int, float, None] = None, max: Union[int, float, None] = None,
                 min_inclusive: bool = True, max_inclusive: bool = True, **kwargs):
        super().__init__("number", key, title, **kwargs)
        if min is not None and max is not None and min >= max:
            raise ValueError(f"NumberItem {key}: min must be less than max")
        self.min = min
        self.max = max
        self.min_inclusive = min_inclusive
        self.max_inclusive = max_inclusive

    def _bounds_text(self) -> str:
        lo = "-inf" if self.min is None else self.min
        hi = "inf" if self.max is None else self.max
        return f"{'[' if self.min_inclusive else '('}{lo}, {hi}{']' if self.max_inclusive else ')'}"

    def _check_type(self, value):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigValueError(self.key, f"expected a number, got {type(value).__name__}")
        return float(value)

    def validate_value(self, value):
        value = self._check_type(value)
        if value != value:
            raise ConfigValueError(self.key, "must not be NaN")
        if self.min is not None and (value < self.min or (value == self.min and not self.min_inclusive)):
            raise ConfigValueError(self.key, f"{value} outside {self._bounds_text()}")
        if self.max is not None and (value > self.max or (value == self.max and not self.max_inclusive)):
            raise ConfigValueError(self.key, f"{value} outside {self._bounds_text()}")
        return value

class IntegerItem(NumberItem):
    """整数类型配置项"""
    def __init__(self, key, title, **kwargs):
        super().__init__(key, title, **kwargs)
        self.type = "integer"

    def _check_type(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigValueError(self.key, f"expected an integer, got {value!r}")
        return value

    def validate_value(self, value):
        return int(super().validate_value(value))

class SingleChoiceItem(ConfigItem):
    """单选类型配置项"""
    def __init__(self, key, title, options: List[str], **kwargs):
        super().__init__("single_choice", key, title, **kwargs)
        self.options = options

    def validate_value(self, value):
        if value not in self.options:
            raise ConfigValueError(self.key, f"{value!r} is not one of {', '.join(self.options)}")
        return value

class ConfigSection:
    """配置区块"""
    def __init__(self, title: str):
        self.title = title
        self.items: List[ConfigItem] = []

    def add_item(self, item: ConfigItem):
        self.items.append(item)
        return self

class Settings:
    """Typed settings schema: sections of items validating a flat key/value object."""

    def __init__(self, title: str, version: int = 1):
        self.title = title
        self.version = version
        self.sections: List[ConfigSection] = []
        self._items_by_key: Dict[str, ConfigItem] = {}

    def add_section(self, section: ConfigSection):
        for item in section.items:
            if item.key in self._items_by_key:
                raise ValueError(f"Duplicate key: {item.key}")
            self._items_by_key[item.key] = item
        self.sections.append(section)
        return self

    def item(self, key: str) -> ConfigItem:
        if key not in self._items_by_key:
            raise ConfigValueError(key, f"unknown key, expected one of {', '.join(self._items_by_key)}")
        return self._items_by_key[key]

    def defaults(self) -> Dict[str, Any]:
        return {key: item.default for key, item in self._items_by_key.items() if item.default is not None}

    def from_obj(self, data: Dict, base: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Validate ``data`` against the schema and merge it over ``base`` (defaults when omitted)."""
        if not isinstance(data, dict):
            raise ConfigValueError("<root>", f"expected an object, got {type(data).__name__}")
        values = dict(self.defaults() if base is None else base)
        for key, raw in data.items():
            values[key] = self.item(key).validate_value(raw)
        for key, item in self._items_by_key.items():
            if item.required and values.get(key, _MISSING) in (_MISSING, None):
                raise ConfigValueError(key, "missing required value")
        return values

    def from_json(self, json_str: str, base: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        try:
            data = json.loads(json_str)
        except json.JSONDecodeError as e:
            raise ConfigValueError("<root>", f"invalid JSON: {e}") from e
        return self.from_obj(data, base)

    def to_json(self) -> Dict:
        return {
            "title": self.title,
            "version": self.version,
            "sections": [
                {
                    "title": section.title,
                    "items": [item.to_dict() for item in section.items]
                }
                for section in self.sections
            ]
        }

    def to_json_str(self, indent=2) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False, indent=indent)

// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace oasgen::validate {

// Frozen structural meta-schema for OpenAPI 3.0.x documents, version 1.
// Warning counts must stay bit-stable across environments and releases, so
// this schema is pinned here rather than fetched; any change to it is a
// versioned format change (bump the id and the version constant together).
inline constexpr const char* kMetaSchemaVersion = "oasgen:openapi-3.0-structural:1";

inline constexpr const char* kOasMetaSchema = R"JSON({
  "$schema": "http://json-schema.org/draft-04/schema#",
  "id": "oasgen:openapi-3.0-structural:1",
  "title": "OpenAPI 3.0 structural meta-schema (frozen, version 1)",
  "type": "object",
  "required": ["openapi", "info", "paths"],
  "properties": {
    "openapi": {"type": "string", "pattern": "^3\\.0\\.[0-9]+$"},
    "info": {"$ref": "#/definitions/info"},
    "servers": {"type": "array", "items": {"$ref": "#/definitions/server"}},
    "paths": {"$ref": "#/definitions/paths"},
    "components": {"$ref": "#/definitions/components"},
    "security": {"type": "array", "items": {"type": "object"}},
    "tags": {"type": "array"},
    "externalDocs": {"type": "object"}
  },
  "additionalProperties": false,
  "definitions": {
    "info": {
      "type": "object",
      "required": ["title", "version"],
      "properties": {
        "title": {"type": "string"},
        "version": {"type": "string"},
        "description": {"type": "string"},
        "termsOfService": {"type": "string"},
        "contact": {"type": "object"},
        "license": {"type": "object"}
      },
      "additionalProperties": false
    },
    "server": {
      "type": "object",
      "required": ["url"],
      "properties": {
        "url": {"type": "string"},
        "description": {"type": "string"},
        "variables": {"type": "object"}
      },
      "additionalProperties": false
    },
    "paths": {
      "type": "object",
      "patternProperties": {"^/": {"$ref": "#/definitions/pathItem"}},
      "additionalProperties": false
    },
    "pathItem": {
      "type": "object",
      "properties": {
        "get": {"$ref": "#/definitions/operation"},
        "put": {"$ref": "#/definitions/operation"},
        "post": {"$ref": "#/definitions/operation"},
        "delete": {"$ref": "#/definitions/operation"},
        "options": {"$ref": "#/definitions/operation"},
        "head": {"$ref": "#/definitions/operation"},
        "patch": {"$ref": "#/definitions/operation"},
        "trace": {"$ref": "#/definitions/operation"},
        "summary": {"type": "string"},
        "description": {"type": "string"},
        "parameters": {"type": "array", "items": {"$ref": "#/definitions/parameter"}},
        "servers": {"type": "array", "items": {"$ref": "#/definitions/server"}}
      },
      "additionalProperties": false
    },
    "operation": {
      "type": "object",
      "required": ["responses"],
      "properties": {
        "tags": {"type": "array", "items": {"type": "string"}},
        "summary": {"type": "string"},
        "description": {"type": "string"},
        "operationId": {"type": "string"},
        "parameters": {"type": "array", "items": {"$ref": "#/definitions/parameter"}},
        "requestBody": {"$ref": "#/definitions/requestBody"},
        "responses": {"$ref": "#/definitions/responses"},
        "deprecated": {"type": "boolean"},
        "security": {"type": "array", "items": {"type": "object"}},
        "servers": {"type": "array", "items": {"$ref": "#/definitions/server"}}
      },
      "additionalProperties": false
    },
    "parameter": {
      "type": "object",
      "required": ["name", "in"],
      "properties": {
        "name": {"type": "string"},
        "in": {"enum": ["query", "header", "path", "cookie"]},
        "description": {"type": "string"},
        "required": {"type": "boolean"},
        "deprecated": {"type": "boolean"},
        "allowEmptyValue": {"type": "boolean"},
        "style": {"type": "string"},
        "explode": {"type": "boolean"},
        "schema": {"$ref": "#/definitions/schema"},
        "example": {}
      },
      "additionalProperties": false,
      "oneOf": [
        {
          "properties": {"in": {"enum": ["path"]}, "required": {"enum": [true]}},
          "required": ["required"]
        },
        {
          "properties": {"in": {"enum": ["query", "header", "cookie"]}}
        }
      ]
    },
    "requestBody": {
      "type": "object",
      "required": ["content"],
      "properties": {
        "description": {"type": "string"},
        "content": {"$ref": "#/definitions/content"},
        "required": {"type": "boolean"}
      },
      "additionalProperties": false
    },
    "content": {
      "type": "object",
      "minProperties": 1,
      "additionalProperties": {"$ref": "#/definitions/mediaType"}
    },
    "mediaType": {
      "type": "object",
      "properties": {
        "schema": {"$ref": "#/definitions/schema"},
        "example": {},
        "examples": {"type": "object"},
        "encoding": {"type": "object"}
      },
      "additionalProperties": false
    },
    "responses": {
      "type": "object",
      "minProperties": 1,
      "patternProperties": {
        "^([1-5][0-9][0-9]|default)$": {"$ref": "#/definitions/response"}
      },
      "additionalProperties": false
    },
    "response": {
      "type": "object",
      "required": ["description"],
      "properties": {
        "description": {"type": "string"},
        "headers": {"type": "object"},
        "content": {"$ref": "#/definitions/content"},
        "links": {"type": "object"}
      },
      "additionalProperties": false
    },
    "schema": {
      "type": "object",
      "properties": {
        "type": {"enum": ["string", "number", "integer", "boolean", "array", "object"]},
        "nullable": {"type": "boolean"},
        "description": {"type": "string"},
        "format": {"type": "string"},
        "title": {"type": "string"},
        "default": {},
        "example": {},
        "enum": {"type": "array"},
        "minimum": {"type": "number"},
        "maximum": {"type": "number"},
        "minLength": {"type": "integer"},
        "maxLength": {"type": "integer"},
        "pattern": {"type": "string"},
        "properties": {
          "type": "object",
          "additionalProperties": {"$ref": "#/definitions/schema"}
        },
        "required": {
          "type": "array",
          "items": {"type": "string"},
          "uniqueItems": true,
          "minItems": 1
        },
        "items": {"$ref": "#/definitions/schema"},
        "additionalProperties": {}
      },
      "additionalProperties": false
    },
    "components": {
      "type": "object",
      "properties": {
        "schemas": {
          "type": "object",
          "additionalProperties": {"$ref": "#/definitions/schema"}
        },
        "securitySchemes": {
          "type": "object",
          "additionalProperties": {"$ref": "#/definitions/securityScheme"}
        },
        "parameters": {"type": "object"},
        "responses": {"type": "object"},
        "requestBodies": {"type": "object"},
        "headers": {"type": "object"}
      },
      "additionalProperties": false
    },
    "securityScheme": {
      "type": "object",
      "required": ["type"],
      "properties": {
        "type": {"enum": ["apiKey", "http", "oauth2", "openIdConnect"]},
        "description": {"type": "string"},
        "name": {"type": "string"},
        "in": {"enum": ["query", "header", "cookie"]},
        "scheme": {"type": "string"},
        "bearerFormat": {"type": "string"},
        "flows": {"type": "object"},
        "openIdConnectUrl": {"type": "string"}
      },
      "additionalProperties": false
    }
  }
})JSON";

}  // namespace oasgen::validate

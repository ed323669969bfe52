#include <tee_internal_api.h>

#define TA_RECORD_UUID { 0x4b7a1f08, 0x2e6d, 0x49c3, { 0xa0, 0x5e, 0x71, 0x8b, 0x2c, 0xd9, 0x46, 0x10 } }

#define CMD_PARSE 0

TEE_Result parse_record(const char *rec, uint32_t len);

static TEE_Result parse(uint32_t param_types, TEE_Param params[4])
{
	(void)param_types;
	if (params[1].memref.size != 64)
		return TEE_ERROR_BAD_PARAMETERS;
	char *buf = params[1].memref.buffer;

	return parse_record(buf, 64);
}

TEE_Result TA_InvokeCommandEntryPoint(void __maybe_unused *sess_ctx, uint32_t cmd_id,
				      uint32_t param_types, TEE_Param params[4])
{
	switch (cmd_id) {
	case CMD_PARSE:
		return parse(param_types, params);
	default:
		return TEE_ERROR_BAD_PARAMETERS;
	}
}
